#include "coherelint/cli.hpp"

int main(int argc, char** argv) { return coherelint::cli::run(argc, argv); }
