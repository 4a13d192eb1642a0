#include <iostream>

#include "pllranges/cli.hpp"

int main(int argc, char** argv) { return pllranges::run_cli(argc, argv, std::cout, std::cerr); }
