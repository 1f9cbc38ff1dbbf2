#include "cli.hpp"

int main(int argc, char** argv) { return lvmotion::cli::run(argc, argv); }
