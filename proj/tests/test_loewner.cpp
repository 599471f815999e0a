#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sle/loewner.hpp"
#include "sle/rng.hpp"
#include "sle/samplers.hpp"

using namespace sle;

namespace {

// independent oracle for the frozen-driving flow: u_t from the closed form,
// log h1 by refined Simpson quadrature of -(1/2) csc^2(u_s/2)
double h1_oracle(double u0, double t) {
    auto integrand = [&](double s) {
        double u = frozen_covering_exact(u0, s);
        return -0.5 * csc2_half(u);
    };
    auto simpson = [&](int n) {
        double h = t / n, acc = integrand(0.0) + integrand(t);
        for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * integrand(k * h);
        return acc * h / 3.0;
    };
    double coarse = simpson(1 << 12), fine = simpson(1 << 13);
    return std::exp((16.0 * fine - coarse) / 15.0);
}

}  // namespace

TEST_CASE("frozen-driving covering flow against the closed form") {
    // antipodal fixed point: h - xi = pi stays put
    DerivativeJet j;
    j.h = PI;
    DerivativeJet out = flow_covering_step(j, 0.0, 1.0, 0.5);
    CHECK(out.h == doctest::Approx(PI).epsilon(1e-14));

    // u0 = pi/2, t = 1: u_1 = 2 arccos(cos(pi/4) e^{-1/2})
    double u1 = frozen_covering_exact(0.5 * PI, 1.0);
    CHECK(u1 == doctest::Approx(2.0 * std::acos(std::cos(0.25 * PI) * std::exp(-0.5))));
    CHECK(u1 == doctest::Approx(2.2553).epsilon(1e-4));

    DerivativeJet jj;
    jj.h = 0.5 * PI;
    DerivativeJet adv = jj;
    int nsteps = 100;
    for (int k = 0; k < nsteps; ++k) adv = flow_covering_step(adv, 0.0, 1.0, 1.0 / nsteps);
    CHECK(adv.h == doctest::Approx(u1).epsilon(1e-12));
    CHECK(adv.h1 == doctest::Approx(h1_oracle(0.5 * PI, 1.0)).epsilon(1e-8));
}

TEST_CASE("jet flow matches theta-derivatives of the flow map") {
    // h1..h3 of the map theta -> h_t(theta) via finite differences in theta
    double t = 0.7, xi = 0.3;
    auto flow = [&](double th) {
        DerivativeJet j;
        j.h = th;
        return flow_covering_step(j, xi, 1.0, t, 16).h;
    };
    double th0 = 1.9, d = 1e-3;
    DerivativeJet j;
    j.h = th0;
    DerivativeJet out = flow_covering_step(j, xi, 1.0, t, 16);
    double f1 = (8.0 * (flow(th0 + d) - flow(th0 - d)) -
                 (flow(th0 + 2.0 * d) - flow(th0 - 2.0 * d))) /
                (12.0 * d);
    double f2 = (flow(th0 + d) - 2.0 * flow(th0) + flow(th0 - d)) / (d * d);
    double f3 = (flow(th0 + 2.0 * d) - 2.0 * flow(th0 + d) + 2.0 * flow(th0 - d) -
                 flow(th0 - 2.0 * d)) /
                (2.0 * d * d * d);
    CHECK(out.h1 == doctest::Approx(f1).epsilon(1e-8));
    CHECK(out.h2 == doctest::Approx(f2).epsilon(1e-5));
    CHECK(out.h3 == doctest::Approx(f3).epsilon(1e-3));
    CHECK(out.h1 > 0.0);
    CHECK(out.h1 <= 1.0);
}

TEST_CASE("multislit state bookkeeping and internal drift") {
    MultiSlitState st({0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0});
    st.joint.grid.add_point(PI / 3.0);
    st.joint.grid.sort_points();
    // frozen symmetric driving: superposed field at theta = pi/3
    double drift = 0.0;
    for (double w : st.driving) drift += cot_half(PI / 3.0 - w);
    // compare against the one-step increment at tiny capacity
    double h0 = st.joint.grid.jet[0].h;
    st.step({0.0, 0.0, 0.0}, 1e-8);
    CHECK((st.joint.grid.jet[0].h - h0) / 1e-8 == doctest::Approx(drift).epsilon(1e-6));
    // capacity additivity: log_cap == sum of per-curve capacities exactly
    st.step({0.01, -0.02, 0.005}, 0.125);
    double sum = 0.0;
    for (double c : st.per_curve_capacity) sum += c;
    CHECK(st.log_cap == doctest::Approx(sum).epsilon(1e-15));
    CHECK(st.log_cap == doctest::Approx(3.0 * (0.125 + 1e-8)).epsilon(1e-12));
    CHECK(st.snapshot_json().find("per_curve_capacity") != std::string::npos);

    // collision guard
    MultiSlitState tight({0.0, 5e-5});
    CHECK_THROWS_AS(tight.step({0.0, 0.0}, 1e-6), CollisionError);
}

TEST_CASE("p = 1 multislit step reduces to the single-slit covering flow") {
    MultiSlitState st({0.7});
    st.joint.grid.add_point(2.2);
    st.joint.grid.add_point(4.0);
    st.joint.grid.sort_points();
    DerivativeJet a;
    a.h = 2.2;
    DerivativeJet b;
    b.h = 4.0;
    for (int k = 0; k < 50; ++k) {
        st.step({0.0}, 0.01);
        a = flow_covering_step(a, 0.7, 1.0, 0.01, 1);
        b = flow_covering_step(b, 0.7, 1.0, 0.01, 1);
    }
    CHECK(st.joint.grid.jet[0].h == doctest::Approx(a.h).epsilon(1e-12));
    CHECK(st.joint.grid.jet[1].h == doctest::Approx(b.h).epsilon(1e-12));
    CHECK(st.joint.grid.jet[0].h1 == doctest::Approx(a.h1).epsilon(1e-12));
}

TEST_CASE("m accumulator: trivial zeros and the exact mixed partial") {
    DerivativeJet id;
    CHECK(m_rate(id) == doctest::Approx(0.0));
    // mixed partial at t = 0, p = 2, gap pi, rates 1
    CHECK(m_mixed_partial(1.0, 1.0, PI, 0.0) == doctest::Approx(0.25).epsilon(1e-14));

    // exactness for smooth (frozen) driving: finite differences of N^j in the
    // other curve's capacity against the symmetric formula
    auto n_rate_after = [&](double cap_other, double cap_own) {
        // grow curve 2 by cap_other, then probe curve 1's tip rate at theta1;
        // with curve 1 ungrown, h_{t,1} equals curve 2's single-slit chart
        double th1 = 0.0, th2 = PI;
        DerivativeJet tip;
        tip.h = th1;
        int n = 256;
        for (int k = 0; k < n; ++k) tip = flow_covering_step(tip, th2, 1.0, cap_other / n, 4);
        (void)cap_own;
        return m_rate(tip);
    };
    double d = 1e-4;
    double fd = (n_rate_after(d, 0.0) - n_rate_after(0.0, 0.0)) / d;
    CHECK(fd == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("tip jet estimation on composed charts") {
    // t = 0: identity chart
    SingleSlitFlow own;
    JointFlow joint;
    own.grid.seed_cluster(1.0, 1e-5, 1.4, 3.0);
    for (double a : own.grid.phi) joint.grid.add_point(a);
    joint.grid.sort_points();
    DerivativeJet j0 = tip_jet_estimate(own, joint, 1.0);
    CHECK(j0.h == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(j0.h1 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::fabs(j0.h2) < 1e-8);

    // p = 2: grow only curve 2; the composed chart at curve 1's tip equals
    // curve 2's own covering chart evaluated at theta1
    double th1 = 1.0, th2 = 1.0 + PI;
    double cap = 0.3;
    int nsteps = 300;
    // curve 1 own chart stays the identity (its own time is frozen), while
    // the joint chart follows curve 2
    for (int k = 0; k < nsteps; ++k) {
        std::vector<double> om = {0.0, th2};
        std::vector<double> dc = {0.0, cap / nsteps};
        joint.step(om, dc);
    }
    DerivativeJet fit = tip_jet_estimate(own, joint, th1);
    DerivativeJet ref;
    ref.h = th1;
    for (int k = 0; k < nsteps; ++k) ref = flow_covering_step(ref, th2, 1.0, cap / nsteps, 4);
    CHECK(fit.h == doctest::Approx(ref.h).epsilon(1e-9));
    CHECK(fit.h1 == doctest::Approx(ref.h1).epsilon(1e-6));
    CHECK(fit.h2 == doctest::Approx(ref.h2).epsilon(1e-4));
    CHECK(fit.h3 == doctest::Approx(ref.h3).epsilon(2e-2));
}

TEST_CASE("backward trace: circle start, frozen-driving geodesic, Koebe bounds") {
    // frozen driving: the trace is the radial geodesic toward 0
    double theta = 0.9;
    std::int64_t steps = 2000;
    double dt = 1e-3;
    std::vector<double> xi(steps + 1, theta);
    CurveTrace tr = trace_paths({xi}, dt, 100, {1.0});
    CHECK(std::abs(tr.points[0][0].second - std::polar(1.0, theta)) < 1e-12);
    for (const auto& [t, z] : tr.points[0]) {
        if (t == 0.0) continue;
        CHECK(std::fabs(reduce_pi(std::arg(z) - theta)) < 1e-10);
        CHECK(std::abs(z) <= 1.0 + 1e-12);
        CHECK(std::abs(z) >= std::exp(-t) / 4.0 - 1e-12);
    }
    // closed form for the frozen-driving tip modulus: u = 2i arccosh(e^{t/2})
    double t_probe = 1.0;
    cplx z = std::polar(1.0, theta);
    for (int k = 0; k < 1000; ++k) z = reverse_step_exact(z, theta, 1e-3);
    double expected = std::exp(-2.0 * std::acosh(std::exp(0.5 * t_probe)));
    CHECK(std::abs(z) == doctest::Approx(expected).epsilon(1e-9));

    // random driving keeps the Koebe window
    SleParams par;
    par.kappa = 2.0;
    DrivingRecord rec = sample_radial_sle(par, 0.0, 1e-3, 3000, 42);
    CurveTrace tr2 = trace_paths({rec.xi}, 1e-3, 50, {1.0});
    for (const auto& [t, zz] : tr2.points[0]) {
        CHECK(std::abs(zz) <= 1.0 + 1e-9);
        CHECK(std::abs(zz) >= std::exp(-t) / 4.0 - 1e-9);
    }
}

TEST_CASE("common-time clock bounds") {
    // p = 1: t_1(t) = t exactly
    std::vector<std::vector<double>> h1 = {std::vector<double>(101, 1.0)};
    auto tj = common_to_multi_time(h1, 0.01);
    CHECK(tj[0].back() == doctest::Approx(1.0).epsilon(1e-12));
    // h1 < 1 gives t_j(t) > t
    std::vector<std::vector<double>> h2 = {std::vector<double>(101, 0.8)};
    auto tj2 = common_to_multi_time(h2, 0.01);
    CHECK(tj2[0].back() == doctest::Approx(1.0 / 0.64).epsilon(1e-12));
    CHECK(tj2[0].back() >= 1.0);
}

TEST_CASE("grid monotonicity is preserved by the flows") {
    SingleSlitFlow own;
    own.grid.seed_cluster(0.0, 1e-4, 1.5, 3.0);
    CounterRng rng(17, 0);
    double xi = 0.0;
    for (int k = 0; k < 400; ++k) {
        xi += 0.05 * rng.normal(0, k);
        own.step(xi, 5e-4);
    }
    double prev = -1e9;
    for (std::size_t k = 0; k < own.grid.phi.size(); ++k) {
        if (!own.grid.alive[k]) continue;
        CHECK(own.grid.jet[k].h > prev);
        prev = own.grid.jet[k].h;
    }
}
