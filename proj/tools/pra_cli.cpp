#include "pra/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return pra::run_cli(argc, argv, std::cout, std::cerr);
}
