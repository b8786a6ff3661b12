#include "hsps/cli/app.hpp"

int main(int argc, char** argv) { return hsps::cli::run(argc, argv); }
