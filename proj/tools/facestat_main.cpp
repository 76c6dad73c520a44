#include <iostream>
#include <string>
#include <vector>

#include "facestat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return facestat::run_cli(args, std::cout, std::cerr);
}
