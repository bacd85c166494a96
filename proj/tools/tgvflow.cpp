#include <iostream>

#include "tgvflow/cli/cli.hpp"

int main(int argc, char** argv) {
  return tgvflow::cli::run_cli(argc, argv, std::cout, std::cerr);
}
