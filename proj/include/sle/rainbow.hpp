// rainbow.hpp
// numeric Coulomb-gas evaluation of the rainbow partition function for
// n in {1,2}, kappa in (4,8): closed screening contours realized as
// figure-eight cycles around each link, quadrature by Gauss-Legendre with
// continuous branch unwrapping seeded at the real anchor configuration
#ifndef SLE_RAINBOW_HPP
#define SLE_RAINBOW_HPP

#include <stdexcept>
#include <vector>

#include "sle/partition.hpp"

namespace sle {

struct BranchTrackingError : std::runtime_error {
    explicit BranchTrackingError(const std::string& w) : std::runtime_error(w) {}
};
struct QuadratureError : std::runtime_error {
    explicit QuadratureError(const std::string& w) : std::runtime_error(w) {}
};

struct RainbowOptions {
    double rel_tol = 1e-8;   // agreement between successive refinements
    int max_nodes = 512;     // per-piece node ceiling
    double imag_tol = 1e-6;  // allowed |Im|/|value| residue
};

// Z_rainbow(H; x^1..x^n, y^n..y^1) for x^1 < ... < x^n < y^n < ... < y^1
PartitionValue rainbow_numeric(int n, double kappa, const std::vector<double>& xs,
                               const std::vector<double>& ys,
                               const RainbowOptions& opt = {});

// chordal BPZ residual of the numeric rainbow values in slot j (0-based over
// the ordered points), all derivatives by Richardson finite differences
double rainbow_chordal_bpz_residual(int n, double kappa, const std::vector<double>& xs,
                                    const std::vector<double>& ys, int j, double fd_step = 0.02);

// raw adjacent product-of-eights cycle over four ascending points (used by
// the n = 2 calibration and by tests)
cplx rainbow_adjacent_cycle(double kappa, const std::vector<double>& pts, int nodes);

// scan quantity R(H; 0, x, y, inf) of the boundedness check
double rainbow_ratio_r(int n, double kappa, const std::vector<double>& xs,
                       const std::vector<double>& ys);

}  // namespace sle

#endif
