#include "commands.hpp"

int main(int argc, char** argv) { return graspmaps::cli::run(argc, argv); }
