#include "tetsum/cli.hpp"

int main(int argc, char** argv) { return tetsum::cli::run(argc, argv); }
