#include "vcore/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return vcore::cli::run(argc, argv, std::cout, std::cerr);
}
