#include <cstdio>

int main() {
  std::fprintf(stderr, "omninav: no subcommands wired up yet\n");
  return 1;
}
