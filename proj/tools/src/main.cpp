#include "anticonc_cli/cli.hpp"

#include <exception>
#include <iostream>

int main(int argc, char** argv) {
    try {
        return anticonc::cli::main_entry(argc, argv, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << '\n';
        return 4;
    }
}
