#include "commons_lab/cli.hpp"

int main(int argc, char** argv) { return commons_lab::cli::run_command(argc, argv); }
