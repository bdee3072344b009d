#include <iostream>
#include <string>
#include <vector>

#include "sfp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sfp::cli::run_cli(args, std::cout, std::cerr);
}
