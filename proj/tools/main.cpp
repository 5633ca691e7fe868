#include <iostream>

#include "subohmic/cli.hpp"

int main(int argc, char** argv) { return subohmic::cli::main_entry(argc, argv, std::cout, std::cerr); }
