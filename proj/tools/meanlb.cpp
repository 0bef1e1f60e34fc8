#include <iostream>
#include <string>
#include <vector>

#include "meanlb/cli.hpp"

int main(int argc, char** argv) {
  return meanlb::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
