#include "sle/samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace sle {

namespace {

// sequential noise source: one counter per path, every draw is addressed
struct NoiseTape {
    CounterRng rng;
    std::uint64_t cursor = 0;
    bool zero = false;
    NoiseTape(std::uint64_t seed, std::uint64_t path, bool zero_noise)
        : rng(seed, path), zero(zero_noise) {}
    double next(std::uint64_t channel) {
        double n = rng.normal(channel, cursor++);
        return zero ? 0.0 : n;
    }
};

}  // namespace

double radial_rho_drift(double kappa, double mu, const std::vector<double>& rho,
                        const std::vector<double>& state) {
    double drift = mu;
    for (std::size_t j = 1; j < state.size(); ++j) {
        drift -= 0.5 * rho[j - 1] * cot_half(state[j] - state[0]);
    }
    return drift;
}

double multiradial_common_drift(double kappa, double mu, const std::vector<double>& omegas,
                                int j) {
    double drift = mu;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (static_cast<int>(i) == j) continue;
        drift += 2.0 * cot_half(omegas[j] - omegas[i]);
    }
    return drift;
}

DrivingRecord sample_radial_sle(const SleParams& par, double theta0, double dt,
                                std::int64_t steps, std::uint64_t seed,
                                const SamplerOptions& opt) {
    if (!(par.kappa > 0.0)) throw std::domain_error("sample_radial_sle: kappa must be positive");
    DrivingRecord rec;
    rec.dt = dt;
    rec.steps = steps;
    rec.seed = seed;
    rec.scheme = "radial";
    rec.xi.resize(steps + 1);
    rec.xi[0] = theta0;
    NoiseTape tape(seed, opt.path_index, opt.zero_noise);
    double sq = std::sqrt(par.kappa * dt);
    for (std::int64_t k = 0; k < steps; ++k) {
        rec.xi[k + 1] = rec.xi[k] + sq * tape.next(0) + par.mu * dt;
    }
    return rec;
}

namespace {

// one adaptive Euler-Maruyama pass over the gap-coupled system; state[0] is
// the driving, state[1..] the force points. The same tape drives an optional
// pair of comparison Bessel processes.
struct RhoSystem {
    double kappa, mu;
    std::vector<double> rho;

    void drift(const std::vector<double>& s, std::vector<double>& out) const {
        out.assign(s.size(), 0.0);
        out[0] = mu;
        for (std::size_t j = 1; j < s.size(); ++j) {
            double c = cot_half(s[j] - s[0]);
            out[0] -= 0.5 * rho[j - 1] * c;
            out[j] = c;
        }
    }

    double min_gap(const std::vector<double>& s) const {
        double g = TWO_PI;
        for (std::size_t j = 1; j < s.size(); ++j) {
            double d = s[j] - s[0];
            g = std::min(g, std::min(d, TWO_PI - d));
        }
        return g;
    }
};

}  // namespace

DrivingRecord sample_radial_sle_rho(const SleParams& par, const AngleConfig& angles, double dt,
                                    std::int64_t steps, std::uint64_t seed,
                                    const SamplerOptions& opt) {
    const int p = angles.p();
    if (static_cast<int>(par.rho.size()) != p - 1) {
        throw std::domain_error("sample_radial_sle_rho: need p-1 weights");
    }
    DrivingRecord rec;
    rec.dt = dt;
    rec.steps = steps;
    rec.seed = seed;
    rec.scheme = "radial_rho";
    rec.xi.resize(steps + 1);
    rec.force_points.assign(p - 1, std::vector<double>(steps + 1));
    RhoSystem sys{par.kappa, par.mu, par.rho};
    std::vector<double> s = angles.angles;
    rec.xi[0] = s[0];
    for (int j = 1; j < p; ++j) rec.force_points[j - 1][0] = s[j];

    NoiseTape tape(seed, opt.path_index, opt.zero_noise);
    std::vector<double> dr;
    long rejections = 0;
    for (std::int64_t k = 0; k < steps; ++k) {
        double left = dt;
        while (left > 0.0) {
            double h = left;
            while (h > opt.dt_min && sys.min_gap(s) < 10.0 * std::sqrt(par.kappa * h)) h *= 0.5;
            for (;;) {
                sys.drift(s, dr);
                double db = std::sqrt(par.kappa * h) * tape.next(0);
                std::vector<double> trial = s;
                trial[0] += db + dr[0] * h;
                for (int j = 1; j < p; ++j) trial[j] += dr[j] * h;
                bool ok = true;
                for (int j = 1; j < p; ++j) {
                    double g = trial[j] - trial[0];
                    if (!(g > 1e-9 && g < TWO_PI - 1e-9)) ok = false;
                }
                if (ok) {
                    s = trial;
                    break;
                }
                if (h > 2.0 * opt.dt_min) {
                    h *= 0.5;
                } else if (++rejections > 100000) {
                    throw std::runtime_error(
                        "sample_radial_sle_rho: gap collapsed below refinement floor");
                }
            }
            left -= h;
        }
        rec.xi[k + 1] = s[0];
        for (int j = 1; j < p; ++j) rec.force_points[j - 1][k + 1] = s[j];
    }
    return rec;
}

DrivingRecord sample_multiradial_common(const SleParams& par, const AngleConfig& angles,
                                        double dt, std::int64_t steps, std::uint64_t seed,
                                        const SamplerOptions& opt) {
    const int p = angles.p();
    DrivingRecord rec;
    rec.dt = dt;
    rec.steps = steps;
    rec.seed = seed;
    rec.scheme = "multiradial_common";
    rec.omegas.assign(p, std::vector<double>(steps + 1));
    std::vector<double> w = angles.angles;
    for (int j = 0; j < p; ++j) rec.omegas[j][0] = w[j];

    NoiseTape tape(seed, opt.path_index, opt.zero_noise);
    auto min_gap = [&](const std::vector<double>& v) {
        double g = TWO_PI;
        for (int i = 0; i < p; ++i) {
            for (int j = i + 1; j < p; ++j) {
                double d = reduce_2pi_pos(v[j] - v[i]);
                g = std::min(g, std::min(d, TWO_PI - d));
            }
        }
        return g;
    };
    long rejections = 0;
    for (std::int64_t k = 0; k < steps; ++k) {
        double left = dt;
        while (left > 0.0) {
            double h = left;
            while (h > opt.dt_min && min_gap(w) < 10.0 * std::sqrt(par.kappa * h)) h *= 0.5;
            for (;;) {
                std::vector<double> trial = w;
                double sq = std::sqrt(par.kappa * h);
                for (int j = 0; j < p; ++j) {
                    trial[j] += sq * tape.next(j) + multiradial_common_drift(par.kappa, par.mu, w, j) * h;
                }
                if (min_gap(trial) > 1e-9) {
                    w = trial;
                    break;
                }
                if (h > 2.0 * opt.dt_min) {
                    h *= 0.5;
                } else if (++rejections > 100000) {
                    throw std::runtime_error(
                        "sample_multiradial_common: gap collapsed below refinement floor");
                }
            }
            left -= h;
        }
        for (int j = 0; j < p; ++j) rec.omegas[j][k + 1] = w[j];
    }
    return rec;
}

BesselRecord sample_bessel(const BesselParams& bp, double dt, std::int64_t steps,
                           std::uint64_t seed, const SamplerOptions& opt) {
    if (!(bp.alpha > 0.0) || !(bp.kappa > 0.0) || bp.kappa > 4.0 * bp.alpha + 1e-12) {
        throw std::domain_error("sample_bessel: need alpha > 0 and kappa <= 4 alpha");
    }
    if (!(bp.x0 > 0.0 && bp.x0 < TWO_PI)) throw std::domain_error("sample_bessel: x0 outside (0,2pi)");
    BesselRecord rec;
    rec.dt = dt;
    rec.steps = steps;
    rec.seed = seed;
    rec.x.resize(steps + 1);
    rec.x[0] = bp.x0;
    rec.min_x = rec.max_x = bp.x0;
    NoiseTape tape(seed, opt.path_index, opt.zero_noise);
    double x = bp.x0;
    long rejections = 0;
    for (std::int64_t k = 0; k < steps; ++k) {
        double left = dt;
        while (left > 0.0) {
            double h = left;
            while (h > opt.dt_min && std::min(x, TWO_PI - x) < 10.0 * std::sqrt(bp.kappa * h)) {
                h *= 0.5;
            }
            for (;;) {
                double trial = x - std::sqrt(bp.kappa * h) * tape.next(0) +
                               (bp.alpha * cot_half(x) - bp.mu) * h;
                if (trial > 1e-9 && trial < TWO_PI - 1e-9) {
                    x = trial;
                    break;
                }
                if (h > 2.0 * opt.dt_min) {
                    h *= 0.5;
                } else if (++rejections > 100000) {
                    throw std::runtime_error("sample_bessel: endpoint reached within guard");
                }
            }
            left -= h;
            rec.min_x = std::min(rec.min_x, x);
            rec.max_x = std::max(rec.max_x, x);
        }
        rec.x[k + 1] = x;
    }
    return rec;
}

CoupledGapRecord sample_coupled_gap(const SleParams& par, const AngleConfig& angles, double dt,
                                    std::int64_t steps, std::uint64_t seed,
                                    const SamplerOptions& opt) {
    const int p = angles.p();
    for (double r : par.rho) {
        if (r < 0.0) throw std::domain_error("sample_coupled_gap: weights must be >= 0");
    }
    double rho_bar = 0.0;
    for (double r : par.rho) rho_bar += r;
    const double alpha = 1.0 + 0.5 * rho_bar;

    CoupledGapRecord rec;
    rec.dt = dt;
    rec.steps = steps;
    rec.seed = seed;
    rec.theta.assign(p - 1, std::vector<double>(steps + 1));
    rec.x_low.resize(steps + 1);
    rec.x_high.resize(steps + 1);

    std::vector<double> th(p - 1);
    for (int j = 1; j < p; ++j) th[j - 1] = angles.angles[j] - angles.angles[0];
    double xl = th[p - 2];  // started at Theta^p_0, coupled to stay below Theta^p
    double xh = th[0];      // started at Theta^2_0, coupled to stay above Theta^2
    for (int j = 0; j < p - 1; ++j) rec.theta[j][0] = th[j];
    rec.x_low[0] = xl;
    rec.x_high[0] = xh;

    NoiseTape tape(seed, opt.path_index, opt.zero_noise);
    auto theta_drift = [&](const std::vector<double>& t, int j) {
        // d Theta^j = -sqrt(k) dB + (1 + rho_j/2) cot(Theta^j/2) dt
        //             + sum_{i != j} (rho_i/2) cot(Theta^i/2) dt - mu dt
        double d = (1.0 + 0.5 * par.rho[j]) * cot_half(t[j]) - par.mu;
        for (int i = 0; i < p - 1; ++i) {
            if (i != j) d += 0.5 * par.rho[i] * cot_half(t[i]);
        }
        return d;
    };
    long rejections = 0;
    for (std::int64_t k = 0; k < steps; ++k) {
        double left = dt;
        while (left > 0.0) {
            double h = left;
            auto tightest = [&]() {
                double g = std::min({xl, TWO_PI - xl, xh, TWO_PI - xh});
                for (double t : th) g = std::min({g, t, TWO_PI - t});
                return g;
            };
            while (h > opt.dt_min && tightest() < 10.0 * std::sqrt(par.kappa * h)) h *= 0.5;
            for (;;) {
                double db = -std::sqrt(par.kappa * h) * tape.next(0);
                std::vector<double> trial = th;
                // identical expression shape as the Bessel update so the
                // p = 2 degenerate case coincides bitwise
                for (int j = 0; j < p - 1; ++j) trial[j] = th[j] + db + theta_drift(th, j) * h;
                double txl = xl + db + (alpha * cot_half(xl) - par.mu) * h;
                double txh = xh + db + (alpha * cot_half(xh) - par.mu) * h;
                bool ok = txl > 1e-9 && txl < TWO_PI - 1e-9 && txh > 1e-9 && txh < TWO_PI - 1e-9;
                for (double t : trial) ok = ok && t > 1e-9 && t < TWO_PI - 1e-9;
                if (ok) {
                    th = trial;
                    xl = txl;
                    xh = txh;
                    break;
                }
                if (h > 2.0 * opt.dt_min) {
                    h *= 0.5;
                } else if (++rejections > 100000) {
                    throw std::runtime_error("sample_coupled_gap: gap collapsed below floor");
                }
            }
            left -= h;
        }
        for (int j = 0; j < p - 1; ++j) rec.theta[j][k + 1] = th[j];
        rec.x_low[k + 1] = xl;
        rec.x_high[k + 1] = xh;
    }
    return rec;
}

DrivingRecord sample_watermelon_driver(double kappa, int n, const AngleConfig& starts,
                                       const BoundaryAngle& target, double dt,
                                       std::int64_t steps, std::uint64_t seed,
                                       const SamplerOptions& opt) {
    if (!(kappa > 0.0 && kappa <= 4.0)) {
        throw std::domain_error("sample_watermelon_driver: kappa outside (0,4]");
    }
    std::vector<double> all = starts.angles;
    all.push_back(target.theta);
    AngleConfig ac(all);
    SleParams par;
    par.kappa = kappa;
    par.mu = 0.0;
    par.p = n + 1;
    par.rho.assign(n, 2.0);
    par.rho.back() = kappa - 4.0 - 2.0 * n;
    DrivingRecord rec = sample_radial_sle_rho(par, ac, dt, steps, seed, opt);
    rec.scheme = "watermelon";
    return rec;
}

}  // namespace sle
