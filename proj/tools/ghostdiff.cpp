#include <iostream>

#include "ghostdiff/cli.hpp"

int main(int argc, char** argv) { return ghostdiff::cli::run_cli(argc, argv, std::cout, std::cerr); }
