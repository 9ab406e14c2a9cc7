#include "commands.hpp"

int main(int argc, char** argv) { return gjcm::cli::run_cli(argc, argv); }
