#include <iostream>
#include <string>
#include <vector>

#include "ascnet/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ascnet::cli::run(args, std::cout, std::cerr);
}
