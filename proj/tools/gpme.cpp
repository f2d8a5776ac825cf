#include <iostream>

#include "gpme/cli.hpp"

int main(int argc, char** argv) { return gpme::cli::run(argc, argv, std::cout, std::cerr); }
