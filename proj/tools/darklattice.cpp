#include "darklattice/config.hpp"

int main(int argc, char** argv) { return darklattice::cli_main(argc, argv); }
