#include <iostream>
#include <string>
#include <vector>

#include "gstein/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return gstein::runCli(args, std::cout, std::cerr);
}
