#include <iostream>
#include <string>
#include <vector>

#include "wvd/commands.hpp"

int main(int argc, char** argv) {
    return wvd::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
