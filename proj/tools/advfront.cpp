#include "advfront/cli.hpp"

int main(int argc, char** argv) {
    return advfront::run_cli(argc, argv);
}
