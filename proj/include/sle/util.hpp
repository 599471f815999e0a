// util.hpp
// small shared helpers: angle reduction, parallel path loops
#ifndef SLE_UTIL_HPP
#define SLE_UTIL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sle {

using cplx = std::complex<double>;

inline constexpr double PI = 3.14159265358979323846;
inline constexpr double TWO_PI = 2.0 * PI;

// reduce to (-pi, pi]
inline double reduce_pi(double x) {
    double y = std::remainder(x, TWO_PI);
    if (y <= -PI) y += TWO_PI;
    return y;
}

// reduce to (0, 2*pi); arguments that are exact multiples of 2*pi map to 2*pi
inline double reduce_2pi_pos(double x) {
    double y = std::fmod(x, TWO_PI);
    if (y <= 0.0) y += TWO_PI;
    return y;
}

// |e^{ia} - e^{ib}| = 2|sin((a-b)/2)|
inline double chord_gap(double a, double b) {
    return 2.0 * std::fabs(std::sin(0.5 * reduce_pi(a - b)));
}

// log|e^{ia} - e^{ib}|, angle difference reduced first
inline double log_chord(double a, double b) {
    double s = std::fabs(std::sin(0.5 * reduce_pi(a - b)));
    if (s <= 0.0) throw std::domain_error("log_chord: coincident angles");
    return std::log(2.0 * s);
}

inline double cot_half(double u) { return 1.0 / std::tan(0.5 * u); }
inline double csc2_half(double u) {
    double s = std::sin(0.5 * u);
    return 1.0 / (s * s);
}

inline int worker_count() {
    if (const char* env = std::getenv("SLE_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// run fn(i) for i in [0, n); work is chunked over threads, results must be
// written to per-index slots so the reduction order stays deterministic
inline void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
    int nw = worker_count();
    if (nw <= 1 || n < 2) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::int64_t chunk = (n + nw - 1) / nw;
    for (int w = 0; w < nw; ++w) {
        std::int64_t lo = w * chunk, hi = std::min<std::int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace sle

#endif
