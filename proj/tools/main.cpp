#include "bubblefd/cli.hpp"

int main(int argc, char** argv) { return bubblefd::run_cli(argc, argv); }
