#include <iostream>

#include "qkd/cli.hpp"

int main(int argc, char** argv) {
  return qkd::cli::run(argc, argv, std::cout, std::cerr);
}
