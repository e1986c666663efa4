#include "geosplit/cli.hpp"

int main(int argc, char** argv) { return geosplit::run(argc, argv); }
