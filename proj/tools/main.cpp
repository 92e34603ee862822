#include "graspkit/cli.hpp"

int main(int argc, char** argv) { return graspkit::run_cli(argc, argv); }
