#include <iostream>

#include "kapitza/cli.hpp"

int main(int argc, char** argv) { return kapitza::cli::run(argc, argv, std::cout, std::cerr); }
