#include "meanreflect/cli.hpp"

int main(int argc, char** argv) { return meanreflect::cli::run_main(argc, argv); }
