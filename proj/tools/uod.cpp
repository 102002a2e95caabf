#include <iostream>

#include "uod/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return uod::cli::run(std::move(args), std::cout, std::cerr);
}
