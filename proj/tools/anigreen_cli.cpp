#include "anigreen/cli.hpp"

int main(int argc, char** argv) { return anigreen::run_cli(argc, argv); }
