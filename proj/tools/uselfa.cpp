#include <iostream>
#include <string>
#include <vector>

#include "uselfa/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return uselfa::app::run(args, std::cout, std::cerr);
}
