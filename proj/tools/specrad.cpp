#include "specrad/harness/cli.hpp"

int main(int argc, char** argv) { return specrad::harness::cli(argc, argv); }
