#include <iostream>
#include <string>
#include <vector>

#include "uavtp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return uavtp::run_cli(args, std::cout, std::cerr);
}
