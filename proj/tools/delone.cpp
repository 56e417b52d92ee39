#include "delone/cli.hpp"

int main(int argc, char** argv) { return delone::run_cli(argc, argv); }
