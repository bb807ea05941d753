#include <iostream>

#include "gydet/cli.hpp"

int main(int argc, char** argv) { return gydet::cli::run_cli(argc, argv, std::cout, std::cerr); }
