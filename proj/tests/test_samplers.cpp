#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sle/samplers.hpp"
#include "sle/stats.hpp"

using namespace sle;

TEST_CASE("plain radial driving moments") {
    SleParams par;
    par.kappa = 2.0;
    par.mu = 0.0;
    std::int64_t n = 10000, steps = 1000;
    double dt = 1e-3, T = steps * dt;
    std::vector<double> ends(n), ends_mu(n), var_samples(n);
    for (std::int64_t i = 0; i < n; ++i) {
        SamplerOptions opt;
        opt.path_index = static_cast<std::uint64_t>(i);
        DrivingRecord r = sample_radial_sle(par, 0.0, dt, steps, 7, opt);
        ends[i] = r.xi.back();
        SleParams pm = par;
        pm.mu = 1.0;
        DrivingRecord rm = sample_radial_sle(pm, 0.0, dt, steps, 9, opt);
        ends_mu[i] = rm.xi.back();
        var_samples[i] = ends[i] * ends[i];
    }
    MeanSE m0 = mean_se(ends);
    CHECK(std::fabs(m0.mean) <= 3.0 * m0.se);
    MeanSE m1 = mean_se(ends_mu);
    CHECK(std::fabs(m1.mean - 1.0 * T) <= 3.0 * m1.se);
    MeanSE v = mean_se(var_samples);
    CHECK(std::fabs(v.mean - par.kappa * T) <= 3.0 * v.se);
}

TEST_CASE("records are bit-for-bit reproducible") {
    SleParams par;
    par.kappa = 3.0;
    par.mu = 0.7;
    par.rho = {2.0, 1.0};
    par.p = 3;
    AngleConfig ac({0.0, 2.0, 4.0});
    DrivingRecord a = sample_radial_sle_rho(par, ac, 1e-3, 500, 1234);
    DrivingRecord b = sample_radial_sle_rho(par, ac, 1e-3, 500, 1234);
    CHECK(a.xi == b.xi);
    CHECK(a.force_points == b.force_points);
    DrivingRecord c = sample_multiradial_common(par, ac, 1e-3, 300, 99);
    DrivingRecord d = sample_multiradial_common(par, ac, 1e-3, 300, 99);
    CHECK(c.omegas == d.omegas);
}

TEST_CASE("rho sampler drift identities") {
    // rho = (2), gap pi, zero noise: the xi-drift is exactly mu
    SleParams par;
    par.kappa = 4.0;
    par.mu = 0.6;
    par.rho = {2.0};
    par.p = 2;
    AngleConfig ac({0.0, PI});
    SamplerOptions opt;
    opt.zero_noise = true;
    DrivingRecord r = sample_radial_sle_rho(par, ac, 1e-6, 1, 5, opt);
    CHECK((r.xi[1] - r.xi[0]) / 1e-6 == doctest::Approx(par.mu).epsilon(1e-9));

    // instantaneous drift equals kappa d/d theta1 log Z at random states
    CounterRng rng(3, 0);
    for (int k = 0; k < 50; ++k) {
        double kap = 2.0 + 3.0 * rng.uniform(0, k), mu = rng.normal(1, k);
        std::vector<double> rho = {2.0, 0.8};
        std::vector<double> st = {0.0, 0.6 + rng.uniform(2, k), 2.5 + rng.uniform(3, k)};
        double drift = radial_rho_drift(kap, mu, rho, st);
        PartitionValue z = z_radial_rho(kap, mu, rho, AngleConfig(st));
        CHECK(drift == doctest::Approx(kap * z.grad[0]).epsilon(1e-10));
    }
}

TEST_CASE("no gap collapse for kappa at the boundary of the safe regime") {
    // kappa = 2, rho = (2,2): no path hits the guard up to T = 5
    SleParams par;
    par.kappa = 2.0;
    par.mu = 0.0;
    par.rho = {2.0, 2.0};
    par.p = 3;
    AngleConfig ac({0.0, 2.0943951023931953, 4.1887902047863905});
    for (std::int64_t i = 0; i < 100; ++i) {
        SamplerOptions opt;
        opt.path_index = static_cast<std::uint64_t>(i);
        CHECK_NOTHROW(sample_radial_sle_rho(par, ac, 1e-3, 5000, 21, opt));
    }
}

TEST_CASE("multiradial drift structure") {
    // p = 2 symmetric: gap drift vanishes; p = 3 symmetric: each drift is mu
    std::vector<double> w2 = {0.0, PI};
    CHECK(multiradial_common_drift(3.0, 0.0, w2, 0) ==
          doctest::Approx(-multiradial_common_drift(3.0, 0.0, w2, 1)).epsilon(1e-13));
    std::vector<double> w3 = {0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0};
    for (int j = 0; j < 3; ++j) {
        CHECK(multiradial_common_drift(3.0, 0.9, w3, j) == doctest::Approx(0.9).epsilon(1e-12));
    }
    // cross-check against the partition-function gradient:
    // 2 sum cot + mu = kappa grad_j log Z + sum cot
    CounterRng rng(8, 0);
    for (int k = 0; k < 50; ++k) {
        double kap = 2.0 + 2.0 * rng.uniform(0, k), mu = rng.normal(1, k);
        std::vector<double> w = {0.0, 0.8 + rng.uniform(2, k), 3.0 + rng.uniform(3, k)};
        PartitionValue z = z_multiradial(kap, mu, AngleConfig(w));
        for (int j = 0; j < 3; ++j) {
            double spect = 0.0;
            for (int i2 = 0; i2 < 3; ++i2) {
                if (i2 != j) spect += cot_half(w[j] - w[i2]);
            }
            CHECK(multiradial_common_drift(kap, mu, w, j) ==
                  doctest::Approx(kap * z.grad[j] + spect).epsilon(1e-10));
        }
    }
}

TEST_CASE("radial Bessel sampler") {
    BesselParams bp;
    bp.alpha = 2.0;
    bp.kappa = 4.0;
    bp.mu = 0.0;
    bp.x0 = PI;
    SamplerOptions zn;
    zn.zero_noise = true;
    BesselRecord r = sample_bessel(bp, 1e-3, 100, 3, zn);
    CHECK(r.x.back() == doctest::Approx(PI).epsilon(1e-12));  // cot(pi/2) = 0

    // boundary avoidance at kappa = 4 alpha
    BesselParams edge;
    edge.alpha = 0.5;
    edge.kappa = 2.0;
    edge.x0 = 2.0;
    for (std::int64_t i = 0; i < 200; ++i) {
        SamplerOptions opt;
        opt.path_index = static_cast<std::uint64_t>(i);
        CHECK_NOTHROW(sample_bessel(edge, 1e-3, 5000, 17, opt));
    }
    CHECK_THROWS_AS(sample_bessel(BesselParams{0.4, 2.0, 0.0, 1.0}, 1e-3, 10, 1),
                    std::domain_error);
}

TEST_CASE("coupled gap sampler: dominance and the p = 2 degenerate identity") {
    SleParams par;
    par.kappa = 2.0;
    par.mu = 0.3;
    par.rho = {2.0, 1.0};
    par.p = 3;
    AngleConfig ac({0.0, 1.5, 3.4});
    for (std::int64_t i = 0; i < 50; ++i) {
        SamplerOptions opt;
        opt.path_index = static_cast<std::uint64_t>(i);
        CoupledGapRecord r = sample_coupled_gap(par, ac, 1e-3, 2000, 5, opt);
        for (std::int64_t k = 0; k <= r.steps; ++k) {
            CHECK(r.x_low[k] <= r.theta[1][k] + 1e-12);
            CHECK(r.x_high[k] >= r.theta[0][k] - 1e-12);
        }
    }
    // p = 2: the gap and both comparison processes coincide pathwise
    SleParams p2;
    p2.kappa = 3.0;
    p2.mu = -0.4;
    p2.rho = {1.7};
    p2.p = 2;
    AngleConfig ac2({0.0, 2.2});
    CoupledGapRecord r2 = sample_coupled_gap(p2, ac2, 1e-3, 1500, 8);
    for (std::int64_t k = 0; k <= r2.steps; ++k) {
        CHECK(r2.x_low[k] == r2.theta[0][k]);
        CHECK(r2.x_high[k] == r2.theta[0][k]);
    }
}

TEST_CASE("exponential gap decay bound holds pathwise") {
    SleParams par;
    par.kappa = 2.0;
    par.mu = 0.0;
    par.rho = {2.0, 2.0};
    par.p = 3;
    AngleConfig ac({0.0, 2.0943951023931953, 4.1887902047863905});
    for (std::int64_t i = 0; i < 30; ++i) {
        SamplerOptions opt;
        opt.path_index = static_cast<std::uint64_t>(i);
        DrivingRecord r = sample_radial_sle_rho(par, ac, 1e-3, 5000, 33, opt);
        double s0 = r.force_points[1][0] - r.force_points[0][0];
        double c = std::sin(0.5 * s0) / s0;
        for (std::int64_t k = 0; k <= r.steps; ++k) {
            double spread = r.force_points[1][k] - r.force_points[0][k];
            CHECK(spread <= s0 * std::exp(-c * k * 1e-3) + 1e-3);
        }
    }
}

TEST_CASE("watermelon driver weights and symmetry") {
    // n = 1 reduces to a single force point of weight kappa - 6 at the target
    double kappa = 3.0;
    AngleConfig starts({1.0});
    SamplerOptions zn;
    zn.zero_noise = true;
    DrivingRecord r = sample_watermelon_driver(kappa, 1, starts, {1.0 + PI}, 1e-6, 1, 4, zn);
    // drift of xi: -(kappa-6)/2 cot((target - xi)/2) at gap pi is zero
    CHECK((r.xi[1] - r.xi[0]) / 1e-6 == doctest::Approx(0.0).epsilon(1e-9));

    // starts symmetric about the target axis: antisymmetric initial drift
    AngleConfig s2({-0.8, 0.8});
    DrivingRecord rs = sample_watermelon_driver(3.0, 2, s2, {PI}, 1e-6, 1, 4, zn);
    AngleConfig s2m({-0.8, 0.8});
    // reflected start: driving from +0.8 instead of -0.8
    // reflected configuration: driver at +0.8, target pi (weight k-4-2n),
    // spectator start at 2 pi - 0.8 (weight 2)
    SleParams par;
    par.kappa = 3.0;
    par.rho = {3.0 - 4.0 - 2.0 * 2.0, 2.0};
    par.p = 3;
    DrivingRecord rr = sample_radial_sle_rho(par, AngleConfig({0.8, PI, TWO_PI - 0.8}), 1e-6, 1,
                                             4, zn);
    double d1 = (rs.xi[1] - rs.xi[0]) / 1e-6;
    double d2 = (rr.xi[1] - rr.xi[0]) / 1e-6;
    CHECK(d1 == doctest::Approx(-d2).epsilon(1e-6));

    // drift consistency with the rho partition function on the same weights
    CounterRng rng(12, 0);
    for (int k = 0; k < 50; ++k) {
        double kap = 2.0 + 2.0 * rng.uniform(0, k);
        int n = 1 + (k % 2);
        std::vector<double> st = {0.0};
        for (int j = 1; j < n; ++j) st.push_back(st.back() + 0.7 + 0.3 * rng.uniform(1, k));
        double target = st.back() + 1.2 + rng.uniform(2, k);
        std::vector<double> rho(n, 2.0);
        rho.back() = kap - 4.0 - 2.0 * n;
        std::vector<double> full = st;
        full.push_back(target);
        PartitionValue z = z_radial_rho(kap, 0.0, rho, AngleConfig(full));
        CHECK(radial_rho_drift(kap, 0.0, rho, full) ==
              doctest::Approx(kap * z.grad[0]).epsilon(1e-10));
    }
}
