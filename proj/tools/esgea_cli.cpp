#include "cli_app.hpp"

int main(int argc, char** argv) { return esgea::cli::run(argc, argv); }
