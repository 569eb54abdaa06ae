#include "cli.hpp"

int main(int argc, char** argv) { return strokeflow::cli::main(argc, argv); }
