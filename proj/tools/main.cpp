#include <iostream>

#include "concede/cli.hpp"

int main(int argc, char** argv) { return concede::run_cli(argc, argv, std::cout, std::cerr); }
