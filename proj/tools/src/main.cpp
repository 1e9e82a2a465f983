#include <iostream>
#include <string>
#include <vector>

#include "rcsim/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return rcsim::run(args, std::cout, std::cerr);
}
