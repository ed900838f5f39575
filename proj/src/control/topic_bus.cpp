#include "omninav/control/topic_bus.hpp"

#include <stdexcept>

namespace omninav {

const std::vector<ChannelInfo>& TopicBus::registry() {
  static const std::vector<ChannelInfo> channels = {
      {"/odom", ChannelKind::kTopic},
      {"/scan", ChannelKind::kTopic},
      {"/cmd_vel", ChannelKind::kTopic},
      {"/mapinfo", ChannelKind::kTopic},
      {"/robot_localization", ChannelKind::kTopic},
      {"/robot_worldmodel", ChannelKind::kTopic},
      {"/robot_pathplanning", ChannelKind::kTopic},
      {"/goal_service", ChannelKind::kService},
      {"/goal_service_control", ChannelKind::kTopic},
      {"/goal_service_behaviour", ChannelKind::kTopic},
      {"/blocked_path_service", ChannelKind::kTopic},
  };
  return channels;
}

TopicBus::TopicBus() = default;

const ChannelInfo& TopicBus::channel(const std::string& name) const {
  for (const ChannelInfo& c : registry()) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("TopicBus: unknown channel " + name);
}

void TopicBus::subscribe(const std::string& topic, Handler handler) {
  if (channel(topic).kind != ChannelKind::kTopic) {
    throw std::logic_error("TopicBus: cannot subscribe to service " + topic);
  }
  subscribers_[topic].push_back(std::move(handler));
}

void TopicBus::publish(const std::string& topic, const std::any& message) {
  if (channel(topic).kind != ChannelKind::kTopic) {
    throw std::logic_error("TopicBus: cannot publish to service " + topic);
  }
  const auto it = subscribers_.find(topic);
  if (it == subscribers_.end()) return;  // no subscribers: drop
  for (const Handler& h : it->second) h(message);
}

std::size_t TopicBus::subscriber_count(const std::string& topic) const {
  channel(topic);
  const auto it = subscribers_.find(topic);
  return it == subscribers_.end() ? 0 : it->second.size();
}

void TopicBus::register_service(const std::string& service, ServiceHandler handler) {
  if (channel(service).kind != ChannelKind::kService) {
    throw std::logic_error("TopicBus: not a service: " + service);
  }
  if (services_.count(service) != 0) {
    throw std::logic_error("TopicBus: service already has a handler: " + service);
  }
  services_[service] = std::move(handler);
}

std::any TopicBus::call(const std::string& service, const std::any& request) {
  if (channel(service).kind != ChannelKind::kService) {
    throw std::logic_error("TopicBus: not a service: " + service);
  }
  const auto it = services_.find(service);
  if (it == services_.end()) {
    throw std::logic_error("TopicBus: no handler for " + service);
  }
  return it->second(request);
}

}  // namespace omninav
