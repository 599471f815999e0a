// suite.hpp
// the acceptance suite: every gated criterion with its pinned tolerance,
// one pass/fail line per criterion
#ifndef SLE_SUITE_HPP
#define SLE_SUITE_HPP

#include <cstdint>
#include <string>

namespace sle {

// runs all criteria; prints one line each; writes a JSON report when
// out_path is non-empty; returns 0 iff everything passed
int run_acceptance_suite(std::uint64_t seed, const std::string& out_path);

}  // namespace sle

#endif
