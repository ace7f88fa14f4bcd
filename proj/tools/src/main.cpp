#include <iostream>

#include "packsell_tools/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return packsell::cli::run(args, std::cout, std::cerr);
}
