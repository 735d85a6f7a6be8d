#include <iostream>

#include "marginlab/experiment.hpp"

int main(int argc, char** argv) { return marginlab::cli_main(argc, argv, std::cout, std::cerr); }
