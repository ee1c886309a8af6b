#include "smoothcert/cli.hpp"

int main(int argc, char** argv) { return smoothcert::cli_dispatch(argc, argv); }
