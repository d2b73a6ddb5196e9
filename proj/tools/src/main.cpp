#include <iostream>

#include "hyperver/cli.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    return hyperver::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
