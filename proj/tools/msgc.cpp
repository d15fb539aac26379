#include <iostream>

#include "msgc/commands.hpp"

int main(int argc, char** argv) {
    return msgc::run_cli(argc, argv, std::cout, std::cerr);
}
