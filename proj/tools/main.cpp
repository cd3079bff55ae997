#include "extail/cli.hpp"

int main(int argc, char** argv) { return extail::cli::run_cli(argc, argv); }
