#include <iostream>
#include <string>
#include <vector>

#include "evadopt/cli.hpp"

int main(int argc, char** argv) {
    return evadopt::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
