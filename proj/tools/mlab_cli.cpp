#include "mlab/cli.hpp"

int main(int argc, char** argv) { return mlab::run_cli(argc, argv); }
