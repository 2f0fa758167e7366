#include <string>
#include <vector>

#include "stormgen/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return stormgen::run_cli(std::move(args));
}
