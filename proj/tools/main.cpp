#include <iostream>

#include <mats/cli.hpp>

int main(int argc, char ** argv) {
    return mats::cliMain(argc, argv, std::cout, std::cerr);
}
