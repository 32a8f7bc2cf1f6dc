#include "gfproj/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gfproj::run(argc, argv, std::cout, std::cerr); }
