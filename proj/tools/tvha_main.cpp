#include "tvha/harness.hpp"

int main(int argc, char** argv) { return tvha::cli_main(argc, argv); }
