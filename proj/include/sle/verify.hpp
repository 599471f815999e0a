// verify.hpp
// statistical and numerical checks turning the process identities into
// assertable reports: martingale expectations, pathwise laws, hitting
// exponents, fusion limits, and the resampling marginal comparison
#ifndef SLE_VERIFY_HPP
#define SLE_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sle/samplers.hpp"
#include "sle/stats.hpp"

namespace sle {

struct McReport {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
    double target = 1.0;
    double z_score = 0.0;
    double z_tolerance = 3.0;
    bool pass = false;
    std::int64_t discarded = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;

    std::string json() const;
};

struct FitReport {
    std::string name;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<double> log_x, log_y;
    double target = 0.0;
    double rel_tolerance = 0.0;
    bool pass = false;

    std::string json() const;
};

struct KsReport {
    std::string name;
    std::vector<std::string> functionals;
    std::vector<double> statistics;
    std::vector<double> p_values;
    double p_threshold = 0.01;
    std::int64_t n_per_side = 0;
    std::int64_t discarded = 0;
    bool pass = false;

    std::string json() const;
};

struct PathwiseReport {
    std::string name;
    std::int64_t n_paths = 0;
    std::int64_t violations = 0;
    std::int64_t discarded = 0;
    double worst_margin = 0.0;  // most negative slack observed
    double extra = 0.0;         // check-specific scalar (e.g. final fraction)
    bool pass = false;

    std::string json() const;
};

// E[exp((mu/k)(xi_T - (mu/2) T))] under plain radial SLE_k equals exp((mu/k) theta)
McReport check_spiral_martingale(double kappa, double mu, double theta, double T, double dt,
                                 std::int64_t n_paths, std::uint64_t seed);

// single-growth slice of the multiradial martingale against 1
McReport check_slice_martingale(double kappa, double mu, int p, const AngleConfig& angles,
                                double T, double dt, std::int64_t n_paths, std::uint64_t seed);

// full two-time martingale with the m_t factor, staircase schedule, p = 2
McReport check_two_time_martingale(double kappa, double mu, const AngleConfig& angles,
                                   double total_capacity, int n_bursts, double dt,
                                   std::int64_t n_paths, std::uint64_t seed,
                                   double z_tolerance = 3.0);

// two-sample KS of first-curve functionals: multiradial marginal vs direct
// radial SLE_k^mu(2,...,2), both on the first curve's own-capacity clock
KsReport check_resampling_marginal(double kappa, double mu, int p, const AngleConfig& angles,
                                   double T, double dt, std::int64_t n_paths,
                                   std::uint64_t seed);

// tau_n capacity window [n - log4 - slack, n + slack] plus terminal modulus
PathwiseReport check_transience(double kappa, double mu, const std::vector<double>& rho,
                                const AngleConfig& angles, int horizon_n, double dt,
                                std::int64_t n_paths, std::uint64_t seed, double slack = 0.05);

// log-log slope of hitting probabilities against 4 alpha / kappa - 1
FitReport fit_hitting_exponent(const BesselParams& bp, const std::vector<double>& epsilons,
                               double t0, double dt, std::int64_t n_paths, std::uint64_t seed,
                               double rel_tolerance);

// rainbow/shuffle ratio against A_n z_fusion as the ends collapse
FitReport check_fusion_limit(int n, double kappa, const std::vector<double>& epsilons,
                             double final_tolerance = 0.02);

// Theta^p - Theta^2 <= (Theta^p_0 - Theta^2_0) exp(-C t) + slack per step
PathwiseReport check_gap_decay(double kappa, double mu, const std::vector<double>& rho,
                               const AngleConfig& angles, double T, double dt,
                               std::int64_t n_paths, std::uint64_t seed, double slack = 1e-3);

// coupled Bessel stays on the correct side at every grid point
PathwiseReport check_coupling_dominance(double kappa, double mu, const std::vector<double>& rho,
                                        const AngleConfig& angles, double T, double dt,
                                        std::int64_t n_paths, std::uint64_t seed);

// t <= t_j(t) <= p t along common-time multiradial paths
PathwiseReport check_timechange_bounds(double kappa, double mu, int p,
                                       const AngleConfig& angles, double T_common, double dt,
                                       std::int64_t n_paths, std::uint64_t seed);

}  // namespace sle

#endif
