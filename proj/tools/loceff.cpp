#include <iostream>
#include <string>
#include <vector>

#include "loceff/driver.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return loceff::run_command(args, std::cout, std::cerr);
}
