#include <iostream>

#include "cheapsub/cli.hpp"

int main(int argc, char** argv)
{
    return cheapsub::run_cli(argc, argv, std::cout, std::cerr);
}
