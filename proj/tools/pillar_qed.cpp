#include "pillarqed/commands.hpp"

int main(int argc, char** argv) { return pillarqed::cli::run(argc, argv); }
