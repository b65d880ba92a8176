#include "obcalc/cli.hpp"

int main(int argc, char** argv) { return obcalc::cli_main(argc, argv); }
