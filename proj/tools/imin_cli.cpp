#include "imin/cli.hpp"

int main(int argc, char** argv) { return imin::cli_main(argc, argv); }
