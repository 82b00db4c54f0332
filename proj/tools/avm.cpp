#include <iostream>

#include "avm/cli.hpp"

int main(int argc, char** argv) { return avm::cli::run(argc, argv, std::cout, std::cerr); }
