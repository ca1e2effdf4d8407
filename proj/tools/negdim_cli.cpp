#include "negdim/cli.hpp"

int main(int argc, char** argv) { return negdim::cli::run(argc, argv); }
