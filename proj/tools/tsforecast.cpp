#include "tsf/cli/app.hpp"

int main(int argc, char** argv) { return tsf::cli::run(argc, argv); }
