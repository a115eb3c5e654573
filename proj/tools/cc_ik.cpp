#include <iostream>

#include "ccik/cli.hpp"

int main(int argc, char** argv) { return ccik::cli::run(argc, argv, std::cout, std::cerr); }
