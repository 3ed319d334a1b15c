#include <iostream>

#include "chiral/cli.hpp"

int main(int argc, char** argv) { return chiral::cli_main(argc, argv, std::cout, std::cerr); }
