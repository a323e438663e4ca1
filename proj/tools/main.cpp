#include "cyberchar/cli.hpp"

int main(int argc, char** argv) { return cyberchar::cli::run(argc, argv); }
