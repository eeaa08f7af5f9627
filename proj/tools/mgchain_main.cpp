#include "mgchain/commands.hpp"

int main(int argc, char** argv) { return mgchain::cli_main(argc, argv); }
