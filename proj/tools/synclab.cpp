#include <iostream>

#include "synclab/cli.hpp"

int main(int argc, char** argv) { return synclab::cli::run(argc, argv, std::cout, std::cerr); }
