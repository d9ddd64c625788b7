#include <iostream>

#include "imopt/selftest.hpp"

int main() { return imopt::cli_selftest(std::cout, std::cerr); }
