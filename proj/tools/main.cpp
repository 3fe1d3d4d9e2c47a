#include "covdiff/pipeline/cli.hpp"

int main(int argc, char** argv) { return covdiff::pipeline::run_cli(argc, argv); }
