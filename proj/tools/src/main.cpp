#include <iostream>

#include "sqlgen_cli/commands.hpp"

int main(int argc, char** argv) { return sqlgen::cli::run(argc, argv, std::cout, std::cerr); }
