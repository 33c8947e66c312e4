#include <iostream>

#include "dissipwave/cli.hpp"

int main(int argc, char** argv) { return dissipwave::run_cli(argc, argv, std::cout, std::cerr); }
