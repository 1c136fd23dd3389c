#include "commands.hpp"

int main(int argc, char** argv) { return ens2::cli::run(argc, argv); }
