#include "flakyfix/cli.hpp"

int main(int argc, char** argv) { return flakyfix::run_cli(argc, argv); }
