#include "stablekit/io/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return stablekit::io::run_cli(argc, argv, std::cout, std::cerr); }
