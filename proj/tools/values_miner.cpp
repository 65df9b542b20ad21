#include <iostream>
#include <string>
#include <vector>

#include "values_miner/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return values_miner::run_command(args, std::cout, std::cerr);
}
