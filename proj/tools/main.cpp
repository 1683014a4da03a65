#include "simma/cli.hpp"

int main(int argc, char** argv) { return simma::cli_main(argc, argv); }
