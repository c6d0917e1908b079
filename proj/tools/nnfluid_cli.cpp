#include "nnfluid/cli.hpp"

int main(int argc, char** argv) { return nnfluid::dispatch(argc, argv); }
