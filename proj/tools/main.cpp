#include "cli.hpp"

int main(int argc, char** argv) { return texstego::cli::run(argc, argv); }
