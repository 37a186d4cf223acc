#include "rrpolicy/cli.hpp"

int main(int argc, char** argv) {
    return rrpolicy::run_cli(argc, argv);
}
