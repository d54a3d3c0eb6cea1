#include <iostream>

#include "infine/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return infine::run_cli(args, std::cout, std::cerr);
}
