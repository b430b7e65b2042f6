#include "cli.hpp"

int main(int argc, char** argv) { return bridgescore::cli::run(argc, argv); }
