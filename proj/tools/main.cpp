#include <iostream>

#include "mmdvar/cli.hpp"

int main(int argc, char** argv) { return mmdvar::cli::run(argc, argv, std::cout, std::cerr); }
