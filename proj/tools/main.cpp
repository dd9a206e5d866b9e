#include <iostream>

#include "fracimp/cli.hpp"

int main(int argc, char** argv) { return fracimp::cli::run(argc, argv, std::cout, std::cerr); }
