#include <iostream>

#include "rantail/cli.hpp"

int main(int argc, char** argv) { return rantail::cli::run(argc, argv, std::cout, std::cerr); }
