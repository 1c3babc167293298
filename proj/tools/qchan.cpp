#include <iostream>
#include <string>
#include <vector>

#include "qchan/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qchan::cli::main_entry(args, std::cout, std::cerr);
}
