#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sle/exponents.hpp"
#include "sle/partition.hpp"
#include "sle/rng.hpp"
#include "sle/special.hpp"

using namespace sle;

namespace {

AngleConfig random_config(int p, std::uint64_t seed, std::uint64_t k, double min_gap = 0.35) {
    CounterRng rng(seed, 77);
    std::vector<double> th(p);
    for (;;) {
        double base = TWO_PI * rng.uniform(900 + k, 0);
        th[0] = base;
        for (int j = 1; j < p; ++j) {
            th[j] = th[j - 1] + min_gap + (TWO_PI / p - min_gap) * rng.uniform(900 + k, j);
        }
        if (th[p - 1] < th[0] + TWO_PI - min_gap) return AngleConfig(th);
    }
}

}  // namespace

TEST_CASE("universal exponents") {
    auto u6 = exponents(6.0);
    CHECK(u6.b == doctest::Approx(0.0));
    CHECK(u6.c == doctest::Approx(0.0));
    auto u83 = exponents(8.0 / 3.0);
    CHECK(u83.c == doctest::Approx(0.0));
    for (double k : {2.0, 3.0, 4.0, 17.0 / 4.0, 5.5}) {
        auto u = exponents(k);
        CHECK(std::fabs(u.c - (1.0 - 24.0 * u.e0 * u.e0)) < 1e-12);
        CHECK(u.h(1) == doctest::Approx(u.b).epsilon(1e-14));
        CHECK(u.h(2) == doctest::Approx(8.0 / k - 1.0));
    }
    CHECK_THROWS_AS(exponents(-1.0), std::domain_error);
}

TEST_CASE("multiradial partition function values and symmetries") {
    // p = 2, kappa = 4, mu = 0, theta = (0, pi): Z = 2^{2/4} = sqrt(2)
    PartitionValue v = z_multiradial(4.0, 0.0, AngleConfig({0.0, PI}));
    CHECK(std::exp(v.log_abs) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    // mu = 0: rotation invariance; mu != 0: rotation covariance e^{(mu/k) p a}
    CounterRng rng(3, 0);
    for (int k = 0; k < 40; ++k) {
        AngleConfig ac = random_config(3, 3, k);
        double al = 2.0 * rng.normal(0, k);
        std::vector<double> rot = ac.angles;
        for (double& x : rot) x += al;
        double l0 = z_multiradial(3.3, 0.0, ac).log_abs;
        CHECK(z_multiradial(3.3, 0.0, AngleConfig(rot)).log_abs ==
              doctest::Approx(l0).epsilon(1e-12));
        double mu = 1.7;
        double l1 = z_multiradial(3.3, mu, ac).log_abs;
        CHECK(z_multiradial(3.3, mu, AngleConfig(rot)).log_abs ==
              doctest::Approx(l1 + (mu / 3.3) * 3.0 * al).epsilon(1e-12));
    }
}

TEST_CASE("rho partition function reductions and drift identity") {
    CounterRng rng(4, 0);
    for (int k = 0; k < 30; ++k) {
        AngleConfig ac = random_config(4, 4, k);
        double kap = 2.0 + 4.0 * rng.uniform(0, k), mu = 2.0 * rng.normal(1, k);
        // all rho = 2 coincides with the multiradial partition function
        PartitionValue a = z_radial_rho(kap, mu, {2.0, 2.0, 2.0}, ac);
        PartitionValue b = z_multiradial(kap, mu, ac);
        CHECK(a.log_abs == doctest::Approx(b.log_abs).epsilon(1e-12));
        for (int j = 0; j < 4; ++j) CHECK(a.grad[j] == doctest::Approx(b.grad[j]).epsilon(1e-12));

        // rho = 0: no dependence on theta^1 beyond the spiral term
        PartitionValue z0 = z_radial_rho(kap, 0.0, {0.0, 0.0, 0.0}, ac);
        CHECK(std::fabs(z0.grad[0]) < 1e-14);

        // kappa grad[0] = mu - sum (rho_j/2) cot((th_j - th_1)/2)
        std::vector<double> rho = {1.3, 0.4, 2.6};
        PartitionValue zr = z_radial_rho(kap, mu, rho, ac);
        double drift = mu;
        for (int j = 1; j < 4; ++j) {
            drift -= 0.5 * rho[j - 1] * cot_half(ac.angles[j] - ac.angles[0]);
        }
        CHECK(kap * zr.grad[0] == doctest::Approx(drift).epsilon(1e-11));
    }
}

TEST_CASE("fusion partition function special cases") {
    // n = 1: Z = |e^{i v} - e^{i t}|^{1 - 6/k}
    for (double kap : {3.0, 5.0, 6.5}) {
        double th = 0.3, vt = 2.1;
        PartitionValue z = z_fusion(kap, AngleConfig({th}), {vt});
        CHECK(z.log_abs ==
              doctest::Approx((1.0 - 6.0 / kap) * log_chord(vt, th)).epsilon(1e-13));
    }
    // kappa = 2(n+2): target dependence drops out
    int n = 2;
    double kap = 2.0 * (n + 2.0);
    PartitionValue za = z_fusion(kap, AngleConfig({0.1, 1.2}), {3.0});
    PartitionValue zb = z_fusion(kap, AngleConfig({0.1, 1.2}), {4.4});
    CHECK(za.log_abs == doctest::Approx(zb.log_abs).epsilon(1e-13));
}

TEST_CASE("gradients of every evaluator match finite differences") {
    CounterRng rng(9, 0);
    auto check_grad = [&](const PartitionEvaluator& pe, const std::vector<double>& th) {
        PartitionValue v = pe.eval(th);
        for (std::size_t j = 0; j < th.size(); ++j) {
            std::vector<double> up = th, dn = th;
            up[j] += 1e-6;
            dn[j] -= 1e-6;
            double fd = (pe.eval(up).log_abs - pe.eval(dn).log_abs) / 2e-6;
            CHECK(v.grad[j] == doctest::Approx(fd).epsilon(1e-7));
        }
    };
    for (int k = 0; k < 100; ++k) {
        double kap = 2.0 + 4.0 * rng.uniform(0, k);
        double mu = 1.5 * rng.normal(1, k);
        AngleConfig ac = random_config(3, 9, k);
        check_grad(make_multiradial_evaluator(kap, mu, 3), ac.angles);
        check_grad(make_radial_rho_evaluator(kap, mu, {2.0, 0.7}, 3), ac.angles);
        check_grad(make_fusion_evaluator(kap, 2), ac.angles);
    }
}

TEST_CASE("radial BPZ residuals of the closed forms") {
    CounterRng rng(13, 0);
    for (double kap : {2.0, 8.0 / 3.0, 4.0}) {
        for (double mu : {0.0, 1.0}) {
            for (int p : {2, 3}) {
                double target = (mu * mu - (p * p - 1.0)) / (2.0 * kap);
                auto pe = make_multiradial_evaluator(kap, mu, p);
                for (int k = 0; k < 20; ++k) {
                    AngleConfig ac = random_config(p, 13, k * 7 + p);
                    for (int j = 0; j < p; ++j) {
                        CHECK(std::fabs(bpz_residual(pe, ac.angles, j, kap, target)) < 1e-6);
                    }
                }
            }
        }
    }
    // fusion function against b~ with the target-point weight h_n
    for (double kap : {3.0, 4.0, 5.0}) {
        auto pe = make_fusion_evaluator(kap, 2);
        double target = exponents(kap).b_tilde;
        for (int k = 0; k < 20; ++k) {
            AngleConfig ac = random_config(3, 14, k);
            for (int j = 0; j < 2; ++j) {
                CHECK(std::fabs(bpz_residual(pe, ac.angles, j, kap, target)) < 1e-6);
            }
        }
    }
    // p = 1 spiral: empty interaction sum, exact identity
    auto pe1 = make_multiradial_evaluator(3.0, 1.4, 1);
    double res = bpz_residual(pe1, {0.7}, 0, 3.0, 1.4 * 1.4 / 6.0);
    CHECK(std::fabs(res) < 1e-9);
}

TEST_CASE("q-integers, Selberg and fusion constants") {
    for (double kap : {4.5, 5.0, 6.0, 7.0}) {
        CHECK(q_integer(1, kap) == doctest::Approx(1.0));
        CHECK(q_integer(2, kap) == doctest::Approx(2.0 * std::cos(4.0 * PI / kap)));
    }
    CHECK(q_integer(2, 16.0 / 3.0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-13));
    // S_1 = Gamma(1-4/k)^2 / Gamma(2-8/k) and S_1 * Gamma(2-8/k)/Gamma(1-4/k)^2 = 1
    for (double kap : {4.7, 5.0, 6.1}) {
        double s1 = selberg_constant(1, kap);
        double direct = gamma_signed(1.0 - 4.0 / kap) * gamma_signed(1.0 - 4.0 / kap) /
                        gamma_signed(2.0 - 8.0 / kap);
        CHECK(s1 == doctest::Approx(direct).epsilon(1e-12));
        CHECK(s1 * gamma_signed(2.0 - 8.0 / kap) /
                  (gamma_signed(1.0 - 4.0 / kap) * gamma_signed(1.0 - 4.0 / kap)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    // S_2 against the displayed expansion at kappa = 5
    {
        double kap = 5.0, t = 4.0 / kap;
        double s2 = 0.5 * gamma_signed(1.0 - 2.0 * t) * gamma_signed(1.0 - 2.0 * t) /
                    gamma_signed(2.0 - 3.0 * t) * gamma_signed(1.0 - t) * gamma_signed(1.0 - t) *
                    gamma_signed(1.0 + 2.0 * t) / (gamma_signed(1.0 + t) * gamma_signed(2.0 - 2.0 * t));
        CHECK(selberg_constant(2, kap) == doctest::Approx(s2).epsilon(1e-10));
    }
    // A_1 = 1 for generic kappa
    for (double kap : {4.6, 5.0, 5.8, 7.2}) {
        CHECK(fusion_constant(1, kap) == doctest::Approx(1.0).epsilon(1e-10));
    }
    // A_2 equals 1/2F1(4/k, 1-4/k, 8/k; 1) via the Gauss formula
    for (double kap : {5.0, 6.0, 7.0}) {
        CHECK(fusion_constant(2, kap) == doctest::Approx(1.0 / gauss_2f1_a2(kap)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(lgamma_signed(-2.0), PoleError);
}

TEST_CASE("interior-point extension and the fusion ratio identity") {
    CounterRng rng(21, 0);
    for (int k = 0; k < 100; ++k) {
        int n = 1 + (k % 3);
        double kap = 2.0 + 4.0 * rng.uniform(0, k);
        AngleConfig ac = random_config(n + 1, 21, k);
        std::vector<double> starts(ac.angles.begin(), ac.angles.end() - 1);
        double vt = ac.angles.back();
        double r = 0.75 * rng.uniform(1, k);
        double az = TWO_PI * rng.uniform(2, k);
        DiscPoint z{r * std::cos(az), r * std::sin(az)};

        auto u = exponents(kap);
        double hn = u.h(n);
        double lhs = -(hn - u.b_tilde - (n * n - 1.0) / (2.0 * kap)) *
                         std::log(conformal_radius_disc(z)) +
                     z_multiradial_interior(kap, 0.0, AngleConfig(starts), z).log_abs -
                     z_fusion(kap, AngleConfig(starts), {vt}).log_abs;
        double rhs = 0.0;
        for (double th : starts) {
            rhs += (hn / n) * std::log(poisson_kernel_interior({th}, z) /
                                       (conformal_radius_disc(z) * boundary_poisson({th}, {vt})));
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("disc and half-plane fusion forms agree through the covariance") {
    // phi : U -> H, phi(w) = i (1+w)/(1-w), phi'(w) = 2i/(1-w)^2
    auto phi = [](cplx w) { return cplx(0.0, 1.0) * (1.0 + w) / (1.0 - w); };
    auto dphi = [](cplx w) { return 2.0 * cplx(0.0, 1.0) / ((1.0 - w) * (1.0 - w)); };
    CounterRng rng(31, 0);
    for (int k = 0; k < 60; ++k) {
        int n = 1 + (k % 2);
        double kap = 2.5 + 4.0 * rng.uniform(0, k);
        // angles in (0, 2 pi) orderly, away from the puncture at angle 0
        std::vector<double> th(n + 1);
        th[0] = 0.4 + 0.8 * rng.uniform(1, k);
        for (int j = 1; j <= n; ++j) th[j] = th[j - 1] + 0.5 + 0.8 * rng.uniform(1 + j, k);
        if (th[n] > 6.0) continue;
        std::vector<double> xs(n);
        for (int j = 0; j < n; ++j) xs[j] = phi(std::polar(1.0, th[j])).real();
        double y = phi(std::polar(1.0, th[n])).real();
        auto u = exponents(kap);
        double log_disc = z_fusion(kap, AngleConfig(std::vector<double>(th.begin(), th.end() - 1)),
                                   {th[n]})
                              .log_abs;
        double log_half = z_fusion_halfplane_log(kap, xs, y);
        double cov = u.h(n) * std::log(std::abs(dphi(std::polar(1.0, th[n]))));
        for (int j = 0; j < n; ++j) cov += u.b * std::log(std::abs(dphi(std::polar(1.0, th[j]))));
        CHECK(log_disc == doctest::Approx(cov + log_half).epsilon(1e-10));
    }
}
