#include <iostream>

#include "mif/cli.hpp"

int main(int argc, char** argv) { return mif::cli::run(argc, argv, std::cout, std::cerr); }
