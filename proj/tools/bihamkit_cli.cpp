#include "bihamkit/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return bihamkit::cli_dispatch(argc, argv, std::cout, std::cerr); }
