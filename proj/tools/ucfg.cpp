#include <iostream>

#include "ucfg/cli.hpp"

int main(int argc, char** argv) { return ucfg::run_cli(argc, argv, std::cout, std::cerr); }
