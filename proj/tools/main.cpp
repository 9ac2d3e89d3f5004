#include "sngrav/cli.hpp"

int main(int argc, char** argv) { return sngrav::cli::run(argc, argv); }
