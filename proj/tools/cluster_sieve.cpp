#include <iostream>

#include "cluster_sieve/cli.hpp"

int main(int argc, char** argv) { return csieve::cli::run(argc, argv, std::cout, std::cerr); }
