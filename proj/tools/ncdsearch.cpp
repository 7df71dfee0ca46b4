#include <iostream>

#include "ncdsearch/cli.hpp"

int main(int argc, char** argv) { return ncdsearch::run_cli(argc, argv, std::cout, std::cerr); }
