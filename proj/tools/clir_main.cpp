#include "clir/cli.hpp"

int main(int argc, char** argv) { return clir::cli::run_cli(argc, argv); }
