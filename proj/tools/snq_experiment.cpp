#include "snq/cli.hpp"

int main(int argc, char** argv) { return snq::cli_main(argc, argv); }
