#include <iostream>

#include "xmethod/cli.hpp"

int main(int argc, char** argv) { return xmethod::cli::run(argc, argv, std::cout, std::cerr); }
