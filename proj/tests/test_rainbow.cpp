#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sle/rainbow.hpp"
#include "sle/special.hpp"

using namespace sle;

TEST_CASE("n = 1 rainbow equals (y-x)^{-2b}") {
    for (double kappa : {4.5, 5.0, 6.0, 7.5}) {
        double b = exponents(kappa).b;
        for (auto [x, y] : {std::pair{0.0, 1.0}, std::pair{-0.7, 2.3}, std::pair{1.0, 1.4}}) {
            PartitionValue z = rainbow_numeric(1, kappa, {x}, {y});
            CHECK(z.phase == doctest::Approx(0.0));
            CHECK(z.value() == doctest::Approx(std::pow(y - x, -2.0 * b)).epsilon(1e-6));
        }
    }
}

TEST_CASE("n = 1 Mobius covariance under scaling") {
    double kappa = 5.0, b = exponents(kappa).b;
    double x = 0.2, y = 1.7;
    PartitionValue z1 = rainbow_numeric(1, kappa, {x}, {y});
    for (double lam : {0.5, 2.0, 3.7}) {
        PartitionValue z2 = rainbow_numeric(1, kappa, {lam * x}, {lam * y});
        CHECK(z2.value() * std::pow(lam, 2.0 * b) == doctest::Approx(z1.value()).epsilon(1e-6));
    }
}

TEST_CASE("n = 2 value is real, positive, and inner-link collapse matches n = 1") {
    double kappa = 5.0, b = exponents(kappa).b;
    PartitionValue z = rainbow_numeric(2, kappa, {0.0, 0.4}, {1.0, 2.0});
    CHECK(z.phase == doctest::Approx(0.0));
    CHECK(std::isfinite(z.log_abs));

    // ASY at the inner link: (y^2 - x^2)^{2b} Z_2 -> Z_1(x^1, y^1), with the
    // finite-size correction decaying like g at this geometry
    double z1 = rainbow_numeric(1, kappa, {0.0}, {2.0}).value();
    double prev = 1e300, first = 0.0;
    for (double g : {0.16, 0.08, 0.04, 0.02}) {
        PartitionValue z2 = rainbow_numeric(2, kappa, {0.0, 1.0 - 0.5 * g}, {1.0 + 0.5 * g, 2.0});
        double dev = std::fabs(std::pow(g, 2.0 * b) * z2.value() / z1 - 1.0);
        CHECK(dev < prev);
        if (first == 0.0) first = dev;
        prev = dev;
    }
    CHECK(prev < 0.2 * first);
    CHECK(prev < 0.08);
}

TEST_CASE("n = 2 chordal BPZ residual from the numeric values") {
    double res0 = rainbow_chordal_bpz_residual(2, 5.0, {0.0, 0.4}, {1.1, 2.1}, 0);
    CHECK(std::fabs(res0) < 1e-3);
}

TEST_CASE("ratio R is scale invariant and bounded on the reference box") {
    double kappa = 5.0;
    double r0 = rainbow_ratio_r(2, kappa, {-0.4, 0.3}, {1.0, 1.9});
    for (double lam : {2.0, 5.0}) {
        double r1 = rainbow_ratio_r(2, kappa, {-0.4 * lam, 0.3 * lam}, {lam, 1.9 * lam});
        CHECK(r1 == doctest::Approx(r0).epsilon(1e-8));
    }
    for (double x1 : {-0.5, -0.1}) {
        for (double x2 : {0.1, 0.5}) {
            for (double y2 : {1.0, 1.6}) {
                for (double y1 : {2.2, 4.0}) {
                    double r = rainbow_ratio_r(2, kappa, {x1, x2}, {y2, y1});
                    CHECK(std::isfinite(r));
                    CHECK(r > 1e-6);
                    CHECK(r < 1e6);
                }
            }
        }
    }
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(rainbow_numeric(1, 3.0, {0.0}, {1.0}), std::domain_error);
    CHECK_THROWS_AS(rainbow_numeric(2, 5.0, {0.0, 2.0}, {1.0, 3.0}), std::domain_error);
    CHECK_THROWS_AS(rainbow_numeric(3, 5.0, {0.0, 1.0, 2.0}, {3.0, 4.0, 5.0}),
                    std::domain_error);
}
