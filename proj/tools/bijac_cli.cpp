#include <iostream>

#include <bijac/cli.hpp>

int main(int argc, char** argv) { return bijac::cli::run(argc, argv, std::cout, std::cerr); }
