#include <iostream>

#include "sakkt/cli.hpp"

int main(int argc, char** argv) {
  return sakkt::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
