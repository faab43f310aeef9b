#include <iostream>
#include <string>
#include <vector>

#include "whydb/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return whydb::cli::run(args, std::cout, std::cerr);
}
