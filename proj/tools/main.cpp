#include "cli.hpp"

int main(int argc, char** argv) { return ran::cli::run(argc, argv); }
