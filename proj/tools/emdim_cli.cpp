#include "emdim/driver.hpp"

#include <iostream>

int main(int argc, char** argv) { return emdim::run_cli(argc, argv, std::cout, std::cerr); }
