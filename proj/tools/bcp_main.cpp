#include <iostream>

#include "bcp/cli.hpp"

int main(int argc, char** argv) { return bcp::cli::main(argc, argv, std::cout, std::cerr); }
