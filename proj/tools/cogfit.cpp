#include "cogfit/cli/run.hpp"

int main(int argc, char** argv) { return cogfit::cli::run(argc, argv); }
