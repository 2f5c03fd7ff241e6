#include <iostream>

#include "prida/cli.hpp"

int main(int argc, char** argv) { return prida::cli::run(argc, argv, std::cout, std::cerr); }
