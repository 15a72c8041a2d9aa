#include <iostream>

#include "spectralmix/cli.hpp"

int main(int argc, char** argv) { return spectralmix::cli::main(argc, argv, std::cout, std::cerr); }
