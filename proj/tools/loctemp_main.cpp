#include "loctemp/cli.hpp"

int main(int argc, char** argv) { return loctemp::run_cli(argc, argv); }
