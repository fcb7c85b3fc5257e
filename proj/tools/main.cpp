#include "ctmcfresh/cli.hpp"

int main(int argc, char** argv) { return ctmcfresh::cli::run(argc, argv); }
