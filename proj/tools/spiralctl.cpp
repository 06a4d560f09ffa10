#include "spiralctl/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return spiralctl::cli::run(argc, argv, std::cout, std::cerr); }
