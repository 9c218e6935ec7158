#include "wolf/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return wolf::run_cli(argc, argv, std::cout, std::cerr); }
