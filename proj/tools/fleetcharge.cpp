#include "fleetcharge/cli.hpp"

int main(int argc, char** argv) { return fleetcharge::cli::main(argc, argv); }
