#include <iostream>

#include "stqa/cli.hpp"

int main(int argc, char** argv) { return stqa::run_cli(argc, argv, std::cout, std::cerr); }
