#include "layered/cli.hpp"

int main(int argc, char** argv) { return layered::cli::dispatch(argc, argv); }
