#include <iostream>

#include "bht_cli/commands.hpp"

int main(int argc, char** argv) { return bht::cli::run(argc, argv, std::cout, std::cerr); }
