#include <iostream>

#include "cartsim/cli.hpp"

int main(int argc, char** argv) {
    return cartsim::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
