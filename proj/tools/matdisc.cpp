#include <iostream>

#include "matdisc/cli.hpp"

int main(int argc, char** argv) { return matdisc::run_cli(argc, argv, std::cout, std::cerr); }
