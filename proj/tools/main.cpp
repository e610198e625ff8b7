#include <iostream>

#include "kghopf/cli.hpp"

int main(int argc, char** argv) { return kghopf::cli::run(argc, argv, std::cout, std::cerr); }
