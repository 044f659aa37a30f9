#include "commands.hpp"

int main(int argc, char** argv) { return locdens::cli::run(argc, argv); }
