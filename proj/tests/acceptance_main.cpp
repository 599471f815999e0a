// acceptance suite runner: one pass/fail line per criterion
#include <cstdlib>

#include "sle/suite.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = 42;
    if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
    return sle::run_acceptance_suite(seed, argc > 2 ? argv[2] : "");
}
