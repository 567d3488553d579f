#include "zeromode/report.hpp"

int main(int argc, char** argv) { return zeromode::run_cli(argc, argv); }
