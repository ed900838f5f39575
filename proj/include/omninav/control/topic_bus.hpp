#pragma once

#include <any>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace omninav {

enum class ChannelKind { kTopic, kService };

struct ChannelInfo {
  std::string name;
  ChannelKind kind;
};

// In-process message bus with a fixed channel registry. Topics broadcast to
// every subscriber synchronously in subscription order (per-topic FIFO by
// construction); services are one-shot request/response with a single
// handler. Handlers may publish or call further channels; dispatch recurses.
class TopicBus {
 public:
  using Handler = std::function<void(const std::any&)>;
  using ServiceHandler = std::function<std::any(const std::any&)>;

  TopicBus();

  static const std::vector<ChannelInfo>& registry();

  // Throws std::out_of_range for names missing from the registry and
  // std::logic_error when the name is a service.
  void subscribe(const std::string& topic, Handler handler);
  void publish(const std::string& topic, const std::any& message);
  std::size_t subscriber_count(const std::string& topic) const;

  // Throws std::out_of_range for unknown names, std::logic_error when the
  // name is a topic, the handler slot is already taken (register), or no
  // handler is installed (call).
  void register_service(const std::string& service, ServiceHandler handler);
  std::any call(const std::string& service, const std::any& request);

 private:
  const ChannelInfo& channel(const std::string& name) const;

  std::map<std::string, std::vector<Handler>> subscribers_;
  std::map<std::string, ServiceHandler> services_;
};

}  // namespace omninav
