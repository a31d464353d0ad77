#include <iostream>

#include "cli_commands.h"

int main(int argc, char** argv) {
  return cgame::cli::run(argc, argv, std::cout, std::cerr);
}
