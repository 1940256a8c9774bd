#include "gsdie/commands.hpp"

int main(int argc, char** argv) { return gsdie::run_cli(argc, argv); }
