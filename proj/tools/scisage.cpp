#include <iostream>
#include <string>
#include <vector>

#include "scisage/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return scisage::cli::run_cli(std::move(args), std::cout, std::cerr);
}
