#include <iostream>

#include "kaclab/cli.hpp"

int main(int argc, char** argv) { return kaclab::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
