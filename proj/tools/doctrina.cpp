#include <cstdlib>
#include <iostream>

#include "doctrina/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::optional<std::string> env_cap;
    if (const char* v = std::getenv("DOCTRINA_CAP")) env_cap = v;
    const auto r = doctrina::run_cli(args, env_cap);
    std::cout << r.out;
    std::cerr << r.err;
    return r.exit_code;
}
