#include "tikflow/cli.hpp"

int main(int argc, char** argv) { return tikflow::cli::run(argc, argv); }
