#include <iostream>

#include "oligo/cli.hpp"

int main(int argc, char** argv) { return oligo::cli::run(argc, argv, std::cout, std::cerr); }
