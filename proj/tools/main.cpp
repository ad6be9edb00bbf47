#include "cli.hpp"

int main(int argc, char** argv) { return hypflow::cli::main_entry(argc, argv); }
