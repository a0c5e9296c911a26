#include "conedisp/cli.hpp"

int main(int argc, char** argv) { return conedisp::run_cli(argc, argv); }
