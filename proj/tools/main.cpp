#include <iostream>

#include "shockpore/cli.hpp"

int main(int argc, char** argv) {
    return shockpore::cli::run(argc, argv, std::cout, std::cerr);
}
