#include <iostream>
#include <string>
#include <vector>

#include "l12cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return l12::cli::run(args, std::cout, std::cerr);
}
