#include "cli.hpp"

int main(int argc, char** argv) { return cafata::cli::run(argc, argv); }
