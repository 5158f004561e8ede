#include "etabs/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return etabs::cli::main_entry(argc, argv, std::cout, std::cerr); }
