#include <iostream>

#include "rgds/cli.hpp"

int main(int argc, char** argv) { return rgds::run_cli(argc, argv, std::cout, std::cerr); }
