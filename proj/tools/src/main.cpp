#include "vudetect_cli/cli.hpp"

int main(int argc, char** argv) { return vudetect::cli::run(argc, argv); }
