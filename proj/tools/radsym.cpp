#include <radsym/cli.hpp>

int main(int argc, char** argv) { return radsym::run_cli(argc, argv); }
