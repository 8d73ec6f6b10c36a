#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv)
{
    lse::cli::configure_logging();
    return lse::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
