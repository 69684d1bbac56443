#include <iostream>

#include "alk/cli.hpp"

int main(int argc, char** argv) { return alk::cli::dispatch(argc, argv, std::cout, std::cerr); }
