#include "promptclass/cli.hpp"

int main(int argc, char** argv) { return promptclass::run_cli(argc, argv); }
