#include "pswalk/cli.hpp"

int main(int argc, char** argv) { return pswalk::run_cli(argc, argv); }
