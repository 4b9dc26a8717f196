#include <iostream>

#include "splitting/cli.hpp"

int main(int argc, char** argv) { return splitting::cli::run_cli(argc, argv, std::cout, std::cerr); }
