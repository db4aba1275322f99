#include <iostream>
#include <vector>

#include "elliptope/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return elliptope::harness::cli_dispatch(args, std::cout, std::cerr);
}
