#include <iostream>

#include "opqkd/cli.hpp"

int main(int argc, char** argv) { return opqkd::cli::run(argc, argv, std::cout, std::cerr); }
