#include "cudfmoo/cli.hpp"

int main(int argc, char** argv) { return cudfmoo::run_cli(argc, argv); }
