#include <iostream>
#include <string>
#include <vector>

#include "khash_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return khash::cli::run(args, std::cout, std::cerr);
}
