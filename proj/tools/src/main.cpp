#include <iostream>

#include "severfit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return severfit::cli::run(args, std::cout, std::cerr);
}
