#include <iostream>

#include "wgf/cli.hpp"

int main(int argc, char** argv) {
  return wgf::run_cli(argc, argv, std::cout, std::cerr);
}
