#include <iostream>
#include <string>
#include <vector>

#include "overlap/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return overlap::cli::run_cli(args, std::cout, std::cerr);
}
