#include <dof3wc/cli.hpp>

int main(int argc, char** argv) { return dof3wc::run_cli(argc, argv); }
