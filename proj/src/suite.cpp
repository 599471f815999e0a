#include "sle/suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "json.hpp"
#include "sle/conformal.hpp"
#include "sle/exponents.hpp"
#include "sle/io.hpp"
#include "sle/partition.hpp"
#include "sle/rainbow.hpp"
#include "sle/rng.hpp"
#include "sle/special.hpp"
#include "sle/verify.hpp"

namespace sle {

namespace {

struct SuiteState {
    nlohmann::json reports = nlohmann::json::array();
    bool all_pass = true;

    void record(int criterion, const std::string& label, bool pass, const std::string& detail,
                double seconds) {
        std::printf("%s criterion %d: %s (%s, %.1fs)\n", pass ? "PASS" : "FAIL", criterion,
                    label.c_str(), detail.c_str(), seconds);
        std::fflush(stdout);
        nlohmann::json j;
        j["criterion"] = criterion;
        j["label"] = label;
        j["pass"] = pass;
        j["detail"] = detail;
        j["seconds"] = seconds;
        reports.push_back(j);
        all_pass = all_pass && pass;
    }
};

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

AngleConfig random_config(int p, CounterRng& rng, std::uint64_t k, double min_gap = 0.35) {
    std::vector<double> th(p);
    for (;;) {
        th[0] = TWO_PI * rng.uniform(500 + k, 0);
        for (int j = 1; j < p; ++j) {
            th[j] = th[j - 1] + min_gap + (TWO_PI / p - min_gap) * rng.uniform(500 + k, j);
        }
        if (th[p - 1] < th[0] + TWO_PI - min_gap) return AngleConfig(th);
    }
}

// ---- criterion 1: exact identity suite ---------------------------------
void criterion_1(SuiteState& st, std::uint64_t seed) {
    double t0 = now_s();
    CounterRng rng(seed, 101);
    double worst_fusion = 0.0, worst_rot = 0.0, worst_cc = 0.0, worst_rho = 0.0;
    for (int k = 0; k < 100; ++k) {
        int n = 1 + (k % 3);
        double kap = 2.0 + 4.0 * rng.uniform(0, k);
        AngleConfig ac = random_config(n + 1, rng, k);
        std::vector<double> starts(ac.angles.begin(), ac.angles.end() - 1);
        double vt = ac.angles.back();
        double r = 0.8 * rng.uniform(1, k);
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
        worst_fusion = std::max(worst_fusion, std::fabs(std::exp(lhs - rhs) - 1.0));

        // rotation invariance of Z^0_p
        int p = 2 + (k % 3);
        AngleConfig ac2 = random_config(p, rng, 200 + k);
        double alpha = 3.0 * rng.normal(3, k);
        std::vector<double> rot = ac2.angles;
        for (double& x : rot) x += alpha;
        worst_rot = std::max(worst_rot,
                             std::fabs(z_multiradial(kap, 0.0, AngleConfig(rot)).log_abs -
                                       z_multiradial(kap, 0.0, ac2).log_abs));
        // all rho = 2 reduction
        double mu = 1.5 * rng.normal(4, k);
        std::vector<double> rho2(p - 1, 2.0);
        worst_rho = std::max(worst_rho,
                             std::fabs(z_radial_rho(kap, mu, rho2, ac2).log_abs -
                                       z_multiradial(kap, mu, ac2).log_abs));
    }
    for (double kap : {2.0, 8.0 / 3.0, 3.0, 4.0, 17.0 / 4.0}) {
        auto u = exponents(kap);
        worst_cc = std::max(worst_cc, std::fabs(u.c - (1.0 - 24.0 * u.e0 * u.e0)));
    }
    bool pass = worst_fusion < 1e-10 && worst_rot < 1e-12 && worst_cc < 1e-12 &&
                worst_rho < 1e-12;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "fusion-ratio %.1e (<1e-10), rotation %.1e, c-identity %.1e, rho2 %.1e "
                  "(<1e-12)",
                  worst_fusion, worst_rot, worst_cc, worst_rho);
    st.record(1, "exact identity suite", pass, buf, now_s() - t0);
}

// ---- criterion 2: BPZ residuals ----------------------------------------
void criterion_2(SuiteState& st, std::uint64_t seed) {
    double t0 = now_s();
    CounterRng rng(seed, 102);
    double worst = 0.0;
    for (double kap : {2.0, 8.0 / 3.0, 4.0}) {
        for (double mu : {0.0, 1.0}) {
            for (int p : {2, 3}) {
                auto pe = make_multiradial_evaluator(kap, mu, p);
                double target = (mu * mu - (p * p - 1.0)) / (2.0 * kap);
                for (int k = 0; k < 20; ++k) {
                    AngleConfig ac = random_config(p, rng, k * 31 + p);
                    for (int j = 0; j < p; ++j) {
                        worst = std::max(
                            worst, std::fabs(bpz_residual(pe, ac.angles, j, kap, target)));
                    }
                }
            }
        }
    }
    double worst_fusion = 0.0;
    for (double kap : {2.0, 8.0 / 3.0, 4.0}) {
        auto pe = make_fusion_evaluator(kap, 2);
        double target = exponents(kap).b_tilde;
        for (int k = 0; k < 20; ++k) {
            AngleConfig ac = random_config(3, rng, 900 + k);
            for (int j = 0; j < 2; ++j) {
                worst_fusion =
                    std::max(worst_fusion, std::fabs(bpz_residual(pe, ac.angles, j, kap, target)));
            }
        }
    }
    bool pass = worst < 1e-6 && worst_fusion < 1e-6;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "spiral residual %.1e, fusion residual %.1e (<1e-6)", worst,
                  worst_fusion);
    st.record(2, "radial BPZ residuals", pass, buf, now_s() - t0);
}

// ---- criterion 3: constants --------------------------------------------
void criterion_3(SuiteState& st) {
    double t0 = now_s();
    double worst_a1 = 0.0;
    for (double kap : {4.4, 5.0, 5.7, 6.5, 7.3}) {
        worst_a1 = std::max(worst_a1, std::fabs(fusion_constant(1, kap) - 1.0));
    }
    double worst_a2 = 0.0;
    for (double kap : {5.0, 6.0, 7.0}) {
        worst_a2 = std::max(
            worst_a2, std::fabs(fusion_constant(2, kap) - 1.0 / gauss_2f1_a2(kap)));
    }
    bool pass = worst_a1 < 1e-10 && worst_a2 < 1e-8;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "A1 dev %.1e (<1e-10), A2 two-route dev %.1e (<1e-8)",
                  worst_a1, worst_a2);
    st.record(3, "fusion constants", pass, buf, now_s() - t0);
}

// ---- criterion 4: rainbow numerics -------------------------------------
void criterion_4(SuiteState& st) {
    double t0 = now_s();
    double b = exponents(5.0).b;
    double v = rainbow_numeric(1, 5.0, {0.0}, {1.0}).value();
    double dev_val = std::fabs(v - 1.0);
    double dev_cov = 0.0;
    PartitionValue z1 = rainbow_numeric(1, 5.0, {0.2, }, {1.7});
    for (double lam : {0.5, 2.0}) {
        PartitionValue z2 = rainbow_numeric(1, 5.0, {0.2 * lam}, {1.7 * lam});
        dev_cov = std::max(dev_cov,
                           std::fabs(z2.value() * std::pow(lam, 2.0 * b) / z1.value() - 1.0));
    }
    double res = rainbow_chordal_bpz_residual(2, 5.0, {0.0, 0.4}, {1.1, 2.1}, 0);
    bool pass = dev_val < 1e-6 && dev_cov < 1e-6 && std::fabs(res) < 1e-3;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "n=1 value dev %.1e, scaling dev %.1e (<1e-6), n=2 BPZ %.1e (<1e-3)", dev_val,
                  dev_cov, std::fabs(res));
    st.record(4, "rainbow numeric", pass, buf, now_s() - t0);
}

// ---- criterion 5: fusion limit -----------------------------------------
void criterion_5(SuiteState& st) {
    double t0 = now_s();
    FitReport r1 = check_fusion_limit(1, 5.0, {0.1, 0.05, 0.025}, 0.02);
    FitReport r2 = check_fusion_limit(2, 5.0, {0.1, 0.05, 0.025}, 0.02);
    bool pass = r1.pass && r2.pass;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "n=1 final dev %.2e, n=2 final dev %.2e (<2e-2, monotone)",
                  std::exp(r1.log_y.back()), std::exp(r2.log_y.back()));
    st.record(5, "fusion limit", pass, buf, now_s() - t0);
}

// ---- criterion 6: martingale MC ----------------------------------------
void criterion_6(SuiteState& st, std::uint64_t seed) {
    double t0 = now_s();
    McReport s1 = check_spiral_martingale(2.0, 1.0, 0.0, 1.0, 1e-4, 10000, seed + 61);
    McReport s2 = check_spiral_martingale(4.0, -2.0, PI, 1.0, 1e-4, 10000, seed + 62);
    McReport s0 = check_spiral_martingale(3.0, 0.0, 0.7, 1.0, 1e-4, 2000, seed + 63);
    bool exact_ok = std::fabs(s0.estimate - 1.0) < 1e-12;
    McReport m1 = check_slice_martingale(3.0, 0.0, 2, AngleConfig({0.0, PI}), 0.5, 1e-4, 10000,
                                         seed + 64);
    McReport m2 = check_slice_martingale(
        4.0, 1.0, 3, AngleConfig({0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0}), 0.5, 1e-4, 10000,
        seed + 65);
    bool pass = s1.pass && s2.pass && exact_ok && m1.pass && m2.pass;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "spiral z=%.2f,%.2f exact(mu=0)=%d slice z=%.2f (disc %lld), z=%.2f (disc "
                  "%lld), |z|<=3",
                  s1.z_score, s2.z_score, int(exact_ok), m1.z_score,
                  static_cast<long long>(m1.discarded), m2.z_score,
                  static_cast<long long>(m2.discarded));
    st.record(6, "martingale MC", pass, buf, now_s() - t0);
}

// ---- criterion 7: two-time martingale with m_t -------------------------
void criterion_7(SuiteState& st, std::uint64_t seed) {
    double t0 = now_s();
    McReport r1 = check_two_time_martingale(8.0 / 3.0, 0.0, AngleConfig({0.0, PI}), 0.4, 8,
                                            2e-4, 4000, seed + 71, 3.0);
    McReport r2 = check_two_time_martingale(3.0, 0.0, AngleConfig({0.0, PI}), 0.4, 8, 2e-4,
                                            4000, seed + 72, 4.0);
    bool pass = r1.pass && r2.pass;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "kappa=8/3: est %.4f z=%.2f (<=3); kappa=3: est %.4f z=%.2f (<=4)", r1.estimate,
                  r1.z_score, r2.estimate, r2.z_score);
    st.record(7, "two-time martingale", pass, buf, now_s() - t0);
}

// ---- criterion 8: Bessel hitting exponents ------------------------------
void criterion_8(SuiteState& st, std::uint64_t seed) {
    double t0 = now_s();
    FitReport f1 = fit_hitting_exponent({2.0, 4.0, 0.0, 0.5 * PI}, {0.2, 0.1, 0.05}, 1.0, 1e-4,
                                        10000, seed + 81, 0.15);
    FitReport f2 = fit_hitting_exponent({1.0, 2.0, 0.0, 0.5 * PI}, {0.2, 0.1, 0.05}, 1.0, 1e-4,
                                        10000, seed + 82, 0.15);
    FitReport f3 = fit_hitting_exponent({2.0, 2.0, 0.0, 0.5 * PI}, {0.4, 0.2, 0.1}, 1.0, 1e-4,
                                        40000, seed + 83, 0.20);
    bool pass = f1.pass && f2.pass && f3.pass;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "slopes %.3f/%.0f%%, %.3f/%.0f%%, %.3f/%.0f%% of targets %.0f, %.0f, %.0f",
                  f1.slope, 100 * std::fabs(f1.slope - f1.target) / f1.target, f2.slope,
                  100 * std::fabs(f2.slope - f2.target) / f2.target, f3.slope,
                  100 * std::fabs(f3.slope - f3.target) / f3.target, f1.target, f2.target,
                  f3.target);
    st.record(8, "Bessel hitting exponents", pass, buf, now_s() - t0);
}

// ---- criterion 9: pathwise laws ----------------------------------------
void criterion_9(SuiteState& st, std::uint64_t seed) {
    double t0 = now_s();
    PathwiseReport tr = check_transience(2.0, 0.0, {}, AngleConfig({0.0}), 5, 1e-3, 500,
                                         seed + 91, 0.05);
    AngleConfig ac3({0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0});
    PathwiseReport gd = check_gap_decay(2.0, 0.0, {2.0, 2.0}, ac3, 5.0, 1e-3, 500, seed + 92);
    PathwiseReport cd = check_coupling_dominance(2.0, 0.0, {2.0, 2.0}, ac3, 5.0, 1e-3, 500,
                                                 seed + 93);
    PathwiseReport tc = check_timechange_bounds(3.0, 0.0, 2, AngleConfig({0.0, PI}), 0.5, 2e-4,
                                                200, seed + 94);
    bool pass = tr.pass && gd.pass && cd.pass && tc.pass;
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "tau-window viol %lld (final inside %.3f), gap-decay viol %lld, coupling viol "
                  "%lld, clock viol %lld",
                  static_cast<long long>(tr.violations), tr.extra,
                  static_cast<long long>(gd.violations), static_cast<long long>(cd.violations),
                  static_cast<long long>(tc.violations));
    st.record(9, "pathwise laws", pass, buf, now_s() - t0);
}

// ---- criterion 10: resampling marginal ----------------------------------
void criterion_10(SuiteState& st, std::uint64_t seed) {
    double t0 = now_s();
    KsReport k1 = check_resampling_marginal(3.0, 0.0, 2, AngleConfig({0.0, PI}), 0.5, 1e-4,
                                            2000, seed + 105);
    KsReport k2 = check_resampling_marginal(4.0, 2.0, 2, AngleConfig({0.0, PI}), 0.5, 1e-4,
                                            2000, seed + 106);
    bool pass = k1.pass && k2.pass;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "KS p-values (%.3f, %.3f, %.3f) and (%.3f, %.3f, %.3f) all > 0.01",
                  k1.p_values[0], k1.p_values[1], k1.p_values[2], k2.p_values[0], k2.p_values[1],
                  k2.p_values[2]);
    st.record(10, "resampling marginal", pass, buf, now_s() - t0);
}

}  // namespace

int run_acceptance_suite(std::uint64_t seed, const std::string& out_path) {
    SuiteState st;
    criterion_1(st, seed);
    criterion_2(st, seed);
    criterion_3(st);
    criterion_4(st);
    criterion_5(st);
    criterion_6(st, seed);
    criterion_7(st, seed);
    criterion_8(st, seed);
    criterion_9(st, seed);
    criterion_10(st, seed);
    std::printf("%s: %d/%d criteria passed\n", st.all_pass ? "SUITE PASS" : "SUITE FAIL",
                static_cast<int>(std::count_if(st.reports.begin(), st.reports.end(),
                                               [](const nlohmann::json& j) {
                                                   return j["pass"].get<bool>();
                                               })),
                static_cast<int>(st.reports.size()));
    if (!out_path.empty()) {
        nlohmann::json out;
        out["seed"] = seed;
        out["criteria"] = st.reports;
        out["pass"] = st.all_pass;
        write_text_file(out_path, out.dump(2));
    }
    return st.all_pass ? 0 : 1;
}

}  // namespace sle
