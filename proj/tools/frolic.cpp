#include "frolic/cli.hpp"

int main(int argc, char** argv) { return frolic::cli::run_cli(argc, argv); }
