#include "mdqda/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mdqda::cli::run(argc, argv, std::cout, std::cerr); }
