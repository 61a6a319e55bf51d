#include "graphtune/cli.hpp"

int main(int argc, char** argv) { return graphtune::run_cli(argc, argv); }
