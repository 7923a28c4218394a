#include <cstdio>
#include <exception>
#include <string>

#include "drank/experiments.hpp"

int main(int argc, char** argv) {
  if (argc >= 2 &&
      (std::string(argv[1]) == "--help" || std::string(argv[1]) == "-h")) {
    std::fputs(drank::usage(), stdout);
    return 0;
  }
  try {
    auto [command, config] = drank::parse_cli(argc, argv);
    return drank::run_command(command, config);
  } catch (const drank::DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const drank::DrError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
