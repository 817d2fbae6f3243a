#include <iostream>

#include "cdlab/cli/commands.hpp"

int main(int argc, char** argv) { return cdl::cli::main_cli(argc, argv, std::cout, std::cerr); }
