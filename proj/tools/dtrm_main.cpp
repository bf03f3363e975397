#include "dtrm/pipeline.hpp"

int main(int argc, char** argv) { return dtrm::run_cli(argc, argv); }
