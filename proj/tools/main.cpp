#include "evplatoon/cli.hpp"

int main(int argc, char** argv) { return evp::run_cli(argc, argv); }
