#include "monosplit/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return monosplit::cli::cli_main(argc, argv, std::cout, std::cerr);
}
