// samplers.hpp
// seeded SDE drivers producing DrivingRecords; every sampler is bit-for-bit
// reproducible from (params, dt, steps, seed, scheme)
#ifndef SLE_SAMPLERS_HPP
#define SLE_SAMPLERS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sle/partition.hpp"
#include "sle/rng.hpp"
#include "sle/util.hpp"

namespace sle {

struct SleParams {
    double kappa = 2.0;
    double mu = 0.0;
    std::vector<double> rho;  // possibly empty
    int p = 1;
};

struct DrivingRecord {
    double dt = 0.0;
    std::int64_t steps = 0;
    std::uint64_t seed = 0;
    std::string scheme;
    std::vector<double> xi;                       // driving path (p=1 schemes)
    std::vector<std::vector<double>> force_points;  // V^j paths, j = 2..p
    std::vector<std::vector<double>> omegas;        // multiradial driving paths
};

struct BesselParams {
    double alpha = 1.0;
    double kappa = 2.0;
    double mu = 0.0;
    double x0 = PI;
};

struct BesselRecord {
    double dt = 0.0;
    std::int64_t steps = 0;
    std::uint64_t seed = 0;
    std::vector<double> x;
    double min_x = 0.0;
    double max_x = 0.0;
};

struct CoupledGapRecord {
    double dt = 0.0;
    std::int64_t steps = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> theta;  // gap paths Theta^2..Theta^p
    std::vector<double> x_low;   // Bessel started at Theta^p_0 (stays below)
    std::vector<double> x_high;  // Bessel started at Theta^2_0 (stays above)
};

struct SamplerOptions {
    bool zero_noise = false;   // deterministic drift-only runs for tests
    double dt_min = 1e-15;     // adaptive refinement floor (time step)
    std::uint64_t path_index = 0;
};

// xi_{k+1} = xi_k + sqrt(kappa dt) N(0,1) + mu dt
DrivingRecord sample_radial_sle(const SleParams& par, double theta0, double dt,
                                std::int64_t steps, std::uint64_t seed,
                                const SamplerOptions& opt = {});

// Euler-Maruyama for Eq. (17): coupled xi and force points, gap-adaptive
DrivingRecord sample_radial_sle_rho(const SleParams& par, const AngleConfig& angles, double dt,
                                    std::int64_t steps, std::uint64_t seed,
                                    const SamplerOptions& opt = {});

// common-time multiradial driving:
// d w_j = sqrt(k) dB_j + (2 sum_{i != j} cot((w_j - w_i)/2) + mu) dt
DrivingRecord sample_multiradial_common(const SleParams& par, const AngleConfig& angles,
                                        double dt, std::int64_t steps, std::uint64_t seed,
                                        const SamplerOptions& opt = {});

// dX = -sqrt(k) dB + (alpha cot(X/2) - mu) dt
BesselRecord sample_bessel(const BesselParams& bp, double dt, std::int64_t steps,
                           std::uint64_t seed, const SamplerOptions& opt = {});

// gap system Theta^j = V^j - xi driven together with the comparison radial
// Bessel X^alpha, alpha = 1 + (rho_2 + ... + rho_p)/2, from the same noise
CoupledGapRecord sample_coupled_gap(const SleParams& par, const AngleConfig& angles, double dt,
                                    std::int64_t steps, std::uint64_t seed,
                                    const SamplerOptions& opt = {});

// radial SLE_k(2,...,2,k-4-2n) toward the target angle; experimental since
// the last weight is negative
DrivingRecord sample_watermelon_driver(double kappa, int n, const AngleConfig& starts,
                                       const BoundaryAngle& target, double dt,
                                       std::int64_t steps, std::uint64_t seed,
                                       const SamplerOptions& opt = {});

// instantaneous xi-drift of the rho-sampler at a given state (test hook)
double radial_rho_drift(double kappa, double mu, const std::vector<double>& rho,
                        const std::vector<double>& state);

// instantaneous drift of the common-time multiradial driving (test hook)
double multiradial_common_drift(double kappa, double mu, const std::vector<double>& omegas,
                                int j);

}  // namespace sle

#endif
