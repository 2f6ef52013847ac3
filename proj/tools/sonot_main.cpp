#include "sonot/experiment.hpp"

int main(int argc, char** argv) { return sonot::run_cli(argc, argv); }
