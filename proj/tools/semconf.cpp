#include "semconf/cli.hpp"

int main(int argc, char** argv) { return semconf::cli::run_cli(argc, argv); }
