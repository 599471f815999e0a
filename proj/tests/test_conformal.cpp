#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sle/conformal.hpp"
#include "sle/rng.hpp"

using namespace sle;

TEST_CASE("conformal radius of the disc") {
    CHECK(conformal_radius_disc({0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(conformal_radius_disc({0.6, 0.0}) == doctest::Approx(0.64));
    CHECK(conformal_radius_disc({0.3, 0.4}) == doctest::Approx(0.75));
    CHECK_THROWS_AS(conformal_radius_disc({1.0, 0.0}), std::domain_error);
}

TEST_CASE("interior Poisson kernel") {
    CHECK(poisson_kernel_interior({2.1}, {0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(poisson_kernel_interior({0.0}, {0.5, 0.0}) == doctest::Approx(3.0));
    CHECK(poisson_kernel_interior({PI}, {0.5, 0.0}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("boundary Poisson kernel") {
    CHECK(boundary_poisson({0.0}, {PI}) == doctest::Approx(0.25));
    CHECK(boundary_poisson({0.0}, {0.5 * PI}) == doctest::Approx(0.5));
    // rotation invariance: depends on the angle difference only
    CounterRng rng(11, 0);
    for (int k = 0; k < 50; ++k) {
        double a = TWO_PI * rng.uniform(0, k), b = a + 0.3 + 2.0 * rng.uniform(1, k);
        double al = 1.3 * rng.normal(2, k);
        CHECK(boundary_poisson({a + al}, {b + al}) == doctest::Approx(boundary_poisson({a}, {b})));
    }
}

TEST_CASE("Mobius normalization map") {
    MobiusToOrigin id({0.0, 0.0});
    CHECK(std::abs(id.eval({0.3, 0.2}) - cplx(0.3, 0.2)) < 1e-15);
    MobiusToOrigin phi({0.5, 0.0});
    CHECK(std::abs(phi.eval({0.5, 0.0})) < 1e-15);
    CHECK(phi.deriv({0.5, 0.0}).real() == doctest::Approx(4.0 / 3.0));

    // |phi(u)-phi(v)| = sqrt(|phi'(u)||phi'(v)|) |u-v| on random boundary pairs
    CounterRng rng(5, 0);
    for (int k = 0; k < 100; ++k) {
        DiscPoint z0{0.8 * (rng.uniform(0, k) - 0.5), 0.8 * (rng.uniform(1, k) - 0.5)};
        MobiusToOrigin m(z0);
        cplx u = std::polar(1.0, TWO_PI * rng.uniform(2, k));
        cplx v = std::polar(1.0, TWO_PI * rng.uniform(3, k));
        double lhs = std::abs(m.eval(u) - m.eval(v));
        double rhs = std::sqrt(std::abs(m.deriv(u)) * std::abs(m.deriv(v))) * std::abs(u - v);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("conformal covariance of kernel and radius under disc automorphisms") {
    CounterRng rng(7, 0);
    for (int k = 0; k < 60; ++k) {
        DiscPoint z0{0.7 * (rng.uniform(0, k) - 0.5), 0.7 * (rng.uniform(1, k) - 0.5)};
        MobiusToOrigin m(z0);
        DiscPoint z{0.85 * (rng.uniform(2, k) - 0.5), 0.85 * (rng.uniform(3, k) - 0.5)};
        double th = TWO_PI * rng.uniform(4, k);
        cplx x = std::polar(1.0, th);
        cplx fx = m.eval(x), fz = m.eval(z.z());
        DiscPoint fzp{fz.real(), fz.imag()};
        // CR(phi(U); phi(z)) = |phi'(z)| CR(U; z)
        double lhs_cr = conformal_radius_disc(fzp);
        CHECK(lhs_cr == doctest::Approx(std::abs(m.deriv(z.z())) * conformal_radius_disc(z))
                            .epsilon(1e-12));
        // |phi'(x)| H(U; phi(x); phi(z)) = H(U; x; z)
        double lhs = std::abs(m.deriv(x)) * poisson_kernel_interior({std::arg(fx)}, fzp);
        CHECK(lhs == doctest::Approx(poisson_kernel_interior({th}, z)).epsilon(1e-12));
    }
}

TEST_CASE("slit hull map basics") {
    // depth -> 0 approaches the identity
    SlitHullMap tiny({{0.7}, 1e-7});
    CHECK(tiny.gk_prime0() == doctest::Approx(1.0).epsilon(1e-5));
    cplx z(0.3, 0.1);
    CHECK(std::abs(tiny.eval(z) - z) < 1e-5);

    // Schwarz bound g_K'(0) >= 1 over a grid of depths and anchors
    for (double d : {0.05, 0.2, 0.5, 0.8, 0.95}) {
        for (double an : {0.0, 1.1, 3.0, 5.2}) {
            SlitHullMap g({{an}, d});
            CHECK(g.gk_prime0() >= 1.0);
            // interior normalization g(0) = 0
            CHECK(std::abs(g.eval({0.0, 0.0})) < 1e-13);
        }
    }

    // slit base maps into the boundary arc around the anchor
    SlitHullMap g({{1.0}, 0.4});
    double left = g.boundary_angle(1.0 - 1e-6), right = g.boundary_angle(1.0 + 1e-6);
    CHECK(std::fabs(reduce_pi(left - 1.0)) < 0.8);
    CHECK(std::fabs(reduce_pi(right - 1.0)) < 0.8);
    CHECK(left < right);
}

TEST_CASE("slit map against numeric derivative and boundary formulas") {
    SlitHullMap g({{0.9}, 0.35});
    // complex derivative vs central differences
    cplx z(0.25, -0.3);
    double h = 1e-6;
    cplx fd = (g.eval(z + h) - g.eval(z - h)) / (2.0 * h);
    CHECK(std::abs(fd - g.deriv(z)) < 1e-7);
    // boundary angle derivative vs finite differences of boundary angle
    double phi = 2.4;
    double da = (g.boundary_angle(phi + 1e-6) - g.boundary_angle(phi - 1e-6)) / 2e-6;
    CHECK(da == doctest::Approx(g.boundary_deriv(phi)).epsilon(1e-5));
    // boundary images lie on the unit circle (approach radially)
    cplx zb = g.eval(std::polar(1.0 - 1e-9, phi));
    CHECK(std::abs(std::abs(zb) - 1.0) < 1e-6);
    CHECK(std::fabs(reduce_pi(std::arg(zb) - g.boundary_angle(phi))) < 1e-6);
}

TEST_CASE("limits of CR and Poisson kernels under a small hull (Lemmas of the geometry layer)") {
    // with K empty: H(U;x;z) / (CR(U;z) H(U;x,y)) -> 1 as z -> y radially
    double thx = 0.4, thy = 2.9;
    double prev = 1e9;
    for (int k = 1; k <= 6; ++k) {
        double r = 1.0 - std::pow(10.0, -k);
        DiscPoint z{r * std::cos(thy), r * std::sin(thy)};
        double ratio = poisson_kernel_interior({thx}, z) /
                       (conformal_radius_disc(z) * boundary_poisson({thx}, {thy}));
        double dev = std::fabs(ratio - 1.0);
        CHECK(dev < 5.0 * std::pow(10.0, -k));
        CHECK(dev < prev);
        prev = dev;
    }

    // K a radial slit away from x: CR(U\K;z)/CR(U;z) -> 1 and H ratios -> 1 as z -> x
    SlitHullMap g({{PI}, 0.3});
    double thx2 = 0.0;
    double prev_cr = 1e9, prev_h = 1e9;
    for (int k = 1; k <= 5; ++k) {
        double r = 1.0 - std::pow(10.0, -k);
        DiscPoint z{r * std::cos(thx2), r * std::sin(thx2)};
        double cr_ratio = g.cr(z) / conformal_radius_disc(z);
        double h_ratio = g.poisson(thx2 + 1e-3, z) / poisson_kernel_interior({thx2 + 1e-3}, z);
        // monotone decrease until the double-precision floor
        CHECK((std::fabs(cr_ratio - 1.0) < prev_cr || std::fabs(cr_ratio - 1.0) < 1e-8));
        CHECK((std::fabs(h_ratio - 1.0) < prev_h || std::fabs(h_ratio - 1.0) < 1e-8));
        prev_cr = std::fabs(cr_ratio - 1.0);
        prev_h = std::fabs(h_ratio - 1.0);
    }
    CHECK(prev_cr < 1e-3);
    CHECK(prev_h < 1e-2);
}
