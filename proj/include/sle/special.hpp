// special.hpp
// signed log-Gamma, q-integers, Selberg and fusion constants
#ifndef SLE_SPECIAL_HPP
#define SLE_SPECIAL_HPP

#include <stdexcept>
#include <string>

namespace sle {

struct PoleError : std::domain_error {
    explicit PoleError(const std::string& what) : std::domain_error(what) {}
};

// log|Gamma(x)| together with the sign of Gamma(x); throws PoleError at
// non-positive integers (the offending argument is named in the message)
struct SignedLogGamma {
    double log_abs;
    int sign;
};
SignedLogGamma lgamma_signed(double x);

// Gamma(x) through the signed-log form; overflows are the caller's problem
double gamma_signed(double x);

// [m]_q = sin(4*pi*m/kappa)/sin(4*pi/kappa) with q = exp(4*pi*i/kappa)
double q_integer(int m, double kappa);
// [n]_q! = prod_{m<=n} [m]_q
double q_factorial(int n, double kappa);

// Selberg product S_n(kappa)
double selberg_constant(int n, double kappa);

// fusion constant A_n(kappa) = ([2]_q^n [n]_q! / [n+1]_q) (1/S_1)^n S_n
double fusion_constant(int n, double kappa);

// 2F1(4/k, 1-4/k, 8/k; 1) by the Gauss evaluation; used as the independent
// route for A_2
double gauss_2f1_a2(double kappa);

}  // namespace sle

#endif
