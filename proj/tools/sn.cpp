#include <iostream>

#include "sn/cli.hpp"

int main(int argc, char** argv) { return sn::cli::run(argc, argv, std::cout, std::cerr); }
