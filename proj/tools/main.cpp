#include "cli.hpp"

int main(int argc, char** argv) { return rapidtail::cli::run(argc, argv); }
