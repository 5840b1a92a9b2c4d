#include "mmdec/cli/cli.hpp"

int main(int argc, char** argv) { return mmdec::cli::run(argc, argv); }
