#include "lvrep/harness.hpp"

int main(int argc, char** argv) { return lvrep::cli_main(argc, argv); }
