#include <iostream>

#include "spanrole/cli.hpp"

int main(int argc, char** argv) {
    return spanrole::run_cli(argc, argv, std::cout, std::cerr);
}
