#include "regen_cli.hpp"

int main(int argc, char** argv) { return regen::cli::run(argc, argv); }
