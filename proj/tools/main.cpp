#include <iostream>

#include "fracsar/cli.hpp"

int main(int argc, char** argv) { return fracsar::run_command(argc, argv, std::cout, std::cerr); }
