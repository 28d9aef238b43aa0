#include <iostream>

#include "mmass/cli.hpp"

int main(int argc, char** argv) {
  return mmass::cli::run(argc, argv, std::cout, std::cerr);
}
