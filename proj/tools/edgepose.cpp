#include <iostream>
#include <string>
#include <vector>

#include "edgepose/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return edgepose::run_cli(args, std::cout, std::cerr);
}
