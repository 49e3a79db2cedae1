#include <iostream>

#include "relay_ee/cli.hpp"

int main(int argc, char** argv) { return relay_ee::cli::run_cli(argc, argv, std::cout, std::cerr); }
