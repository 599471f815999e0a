// exponents.hpp
// the universal CFT/SLE parameters indexed by kappa
#ifndef SLE_EXPONENTS_HPP
#define SLE_EXPONENTS_HPP

#include <cmath>
#include <stdexcept>

namespace sle {

struct UniversalExponents {
    double kappa;
    double b;        // (6-k)/(2k)
    double b_tilde;  // (6-k)(k-2)/(8k)
    double c;        // (6-k)(3k-8)/(2k)
    double e0;       // (k-4)/(4 sqrt(k))

    // weight of a pure electric charge e
    double delta(double e) const { return e * e - 2.0 * e * e0; }

    // h_n = n(n+2)/k - n/2
    double h(double n) const { return n * (n + 2.0) / kappa - 0.5 * n; }
};

inline UniversalExponents exponents(double kappa) {
    if (!(kappa > 0.0)) throw std::domain_error("exponents: kappa must be positive");
    UniversalExponents u;
    u.kappa = kappa;
    u.b = (6.0 - kappa) / (2.0 * kappa);
    u.b_tilde = (6.0 - kappa) * (kappa - 2.0) / (8.0 * kappa);
    u.c = (6.0 - kappa) * (3.0 * kappa - 8.0) / (2.0 * kappa);
    u.e0 = (kappa - 4.0) / (4.0 * std::sqrt(kappa));
    return u;
}

}  // namespace sle

#endif
