#include "namegender/cli.hpp"

int main(int argc, char** argv) { return namegender::run_cli(argc, argv); }
