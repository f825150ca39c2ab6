#include <iostream>
#include <string>
#include <vector>

#include "infosell/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return infosell::cli::run(args, std::cout, std::cerr);
}
