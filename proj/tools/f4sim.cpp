#include "f4/cli.hpp"

int main(int argc, char** argv) { return f4::cli::run(argc, argv); }
