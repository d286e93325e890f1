#include <iostream>

#include "sabc/cli.hpp"

int main(int argc, char** argv) { return sabc::cli_main(argc, argv, std::cout, std::cerr); }
