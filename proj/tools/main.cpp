#include "dln/cli.hpp"

int main(int argc, char** argv) { return dln::cli::run(argc, argv); }
