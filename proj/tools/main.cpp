#include <iostream>

#include "afshar/cli.hpp"

int main(int argc, char** argv) {
  return afshar::run_cli(argc, argv, std::cout, std::cerr);
}
