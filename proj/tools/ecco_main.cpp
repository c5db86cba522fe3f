#include "ecco/cli.hpp"

int main(int argc, char** argv) { return ecco::cli_main(argc, argv); }
