#include <iostream>
#include <string>
#include <vector>

#include "shearlet/run.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return shearlet::run_cli(args, std::cout, std::cerr);
}
