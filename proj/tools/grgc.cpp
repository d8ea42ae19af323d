#include "grgc/cli.hpp"

int main(int argc, char** argv) { return grgc::cli::run(argc, argv); }
