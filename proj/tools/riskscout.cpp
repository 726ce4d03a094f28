#include <iostream>

#include "riskscout/cli.hpp"

int main(int argc, char** argv) { return riskscout::runCli(argc, argv, std::cout, std::cerr); }
