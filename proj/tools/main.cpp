#include <iostream>

#include "kernmem_cli.hpp"

int main(int argc, char** argv) { return kernmem::cli::run_cli(argc, argv, std::cout, std::cerr); }
