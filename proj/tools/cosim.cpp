#include <iostream>

#include "cosim/cli/commands.hpp"

int main(int argc, char** argv) {
  return cosim::cli::run_cli(argc, argv, std::cout, std::cerr);
}
