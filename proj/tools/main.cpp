#include "geomancer_cli.hpp"

int main(int argc, char** argv) { return geomancer::cli::run(argc, argv); }
