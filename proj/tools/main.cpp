#include "qanm/harness.hpp"

int main(int argc, char** argv) { return qanm::cli_main(argc, argv); }
