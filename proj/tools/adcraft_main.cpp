#include <iostream>

#include "adcraft/cli/commands.hpp"

int main(int argc, char** argv) { return adcraft::cli::run(argc, argv, std::cout, std::cerr); }
