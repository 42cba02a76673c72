#include "omsim/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return omsim::cli::run(argc, argv, std::cout, std::cerr);
}
