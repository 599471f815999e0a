#include "sle/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"

namespace sle {

double m_rate(const DerivativeJet& tip) {
    return -tip.schwarzian() / 3.0 + (1.0 - tip.h1 * tip.h1) / 6.0;
}

double m_mixed_partial(double a_i, double a_j, double omega_j, double omega_i) {
    double s = std::sin(0.5 * reduce_pi(omega_j - omega_i));
    return a_i * a_j / (4.0 * s * s * s * s);
}

namespace {

// jet of the frozen-driving flow map of du/dt = cot(u/2) run for capacity
// dcap, at base point u0 in (0, 2*pi): cos(F/2) = e^{-dcap/2} cos(u0/2)
struct FrozenMap {
    double F, F1, F2, F3;
};

FrozenMap frozen_map(double u0, double dcap) {
    double E = std::exp(-0.5 * dcap);
    double c0 = std::cos(0.5 * u0), s0 = std::sin(0.5 * u0);
    double C = E * c0;
    double S = std::sqrt(std::max(0.0, 1.0 - C * C));
    FrozenMap m;
    m.F = 2.0 * std::acos(std::clamp(C, -1.0, 1.0));
    m.F1 = E * s0 / S;
    double om = 1.0 - E * E;
    m.F2 = 0.5 * E * c0 * om / (S * S * S);
    m.F3 = -0.25 * om * E * s0 * (S * S + 3.0 * E * E * c0 * c0) / (S * S * S * S * S);
    return m;
}

DerivativeJet apply_frozen(const DerivativeJet& jet, double xi, double dcap, double guard,
                           double t_now) {
    double u_lift = jet.h - xi;
    double u = reduce_2pi_pos(u_lift);
    double shift = u_lift - u;  // multiple of 2*pi
    if (std::fabs(std::sin(0.5 * u)) < guard) throw SwallowedPointError(t_now);
    FrozenMap m = frozen_map(u, dcap);
    DerivativeJet out;
    out.h = xi + shift + m.F;
    out.h1 = m.F1 * jet.h1;
    out.h2 = m.F2 * jet.h1 * jet.h1 + m.F1 * jet.h2;
    out.h3 = m.F3 * jet.h1 * jet.h1 * jet.h1 + 3.0 * m.F2 * jet.h1 * jet.h2 + m.F1 * jet.h3;
    return out;
}

bool crossed(double h, double xi_old, double xi_new) {
    double a = reduce_pi(h - xi_old), b = reduce_pi(h - xi_new);
    return std::fabs(a) < 0.5 && std::fabs(b) < 0.5 && ((a <= 0.0) != (b <= 0.0));
}

}  // namespace

DerivativeJet flow_covering_step(const DerivativeJet& jet, double xi, double rate, double dt,
                                 int nsub, double guard, double t_now) {
    DerivativeJet cur = jet;
    double dcap = rate * dt / nsub;
    for (int s = 0; s < nsub; ++s) cur = apply_frozen(cur, xi, dcap, guard, t_now);
    return cur;
}

double frozen_covering_exact(double u0, double t) {
    return 2.0 * std::acos(std::clamp(std::exp(-0.5 * t) * std::cos(0.5 * u0), -1.0, 1.0));
}

cplx reverse_step_exact(cplx z, double xi, double dcap) {
    cplx w = z * std::polar(1.0, -xi);
    cplx u = cplx(std::arg(w), -std::log(std::max(1e-300, std::abs(w))));
    cplx c = std::cos(0.5 * u);
    cplx c2 = std::exp(0.5 * dcap) * c;
    cplx a = std::acos(c2);
    // candidates +-acos; keep the one in the closed upper half (|z| <= 1)
    cplx half;
    if (a.imag() >= 1e-14) {
        half = a;
    } else if (a.imag() <= -1e-14) {
        half = -a;
    } else {
        half = (std::abs(a - 0.5 * u) <= std::abs(-a - 0.5 * u)) ? a : -a;
    }
    cplx u2 = 2.0 * half;
    return std::polar(1.0, xi) * std::exp(cplx(0.0, 1.0) * u2);
}

void CoveringGrid::seed_cluster(double center, double delta_min, double ratio, double span) {
    double d = delta_min;
    while (d < span) {
        add_point(center - d);
        add_point(center + d);
        d *= ratio;
    }
    sort_points();
}

void CoveringGrid::add_point(double angle) {
    DerivativeJet j;
    j.h = angle;
    phi.push_back(angle);
    jet.push_back(j);
    alive.push_back(1);
}

void CoveringGrid::sort_points() {
    std::vector<std::size_t> idx(phi.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return phi[a] < phi[b]; });
    CoveringGrid tmp;
    for (std::size_t k : idx) {
        tmp.phi.push_back(phi[k]);
        tmp.jet.push_back(jet[k]);
        tmp.alive.push_back(alive[k]);
    }
    *this = std::move(tmp);
}

void SingleSlitFlow::begin(double xi0) {
    xi_hist = {xi0};
    dt_hist = {0.0};
}

void SingleSlitFlow::step(double xi, double dt, double guard) {
    if (!xi_hist.empty()) {
        double xi_old = xi_hist.back();
        for (std::size_t k = 0; k < grid.phi.size(); ++k) {
            if (grid.alive[k] && crossed(grid.jet[k].h, xi_old, xi)) grid.alive[k] = 0;
        }
    }
    for (std::size_t k = 0; k < grid.phi.size(); ++k) {
        if (!grid.alive[k]) continue;
        double u = reduce_2pi_pos(grid.jet[k].h - xi);
        if (std::fabs(std::sin(0.5 * u)) < guard) {
            grid.alive[k] = 0;
            continue;
        }
        grid.jet[k] = apply_frozen(grid.jet[k], xi, dt, guard, t);
    }
    xi_hist.push_back(xi);
    dt_hist.push_back(dt);
    t += dt;
}

DerivativeJet SingleSlitFlow::replay(double angle, bool* swallowed) const {
    DerivativeJet j;
    j.h = angle;
    *swallowed = false;
    double tt = 0.0;
    for (std::size_t s = 0; s < xi_hist.size(); ++s) {
        if (s > 0 && crossed(j.h, xi_hist[s - 1], xi_hist[s])) {
            *swallowed = true;
            return j;
        }
        double u = reduce_2pi_pos(j.h - xi_hist[s]);
        if (std::fabs(std::sin(0.5 * u)) < 1e-9) {
            *swallowed = true;
            return j;
        }
        j = apply_frozen(j, xi_hist[s], dt_hist[s], 1e-12, tt);
        tt += dt_hist[s];
    }
    return j;
}

bool SingleSlitFlow::insert_point(double angle) {
    bool sw = false;
    DerivativeJet j = replay(angle, &sw);
    if (sw) return false;
    grid.phi.push_back(angle);
    grid.jet.push_back(j);
    grid.alive.push_back(1);
    grid.sort_points();
    return true;
}

void JointFlow::begin(const std::vector<double>& omega0) {
    omega_hist = {omega0};
    dcap_hist = {std::vector<double>(omega0.size(), 0.0)};
}

void JointFlow::step(const std::vector<double>& omega, const std::vector<double>& dcap,
                     double guard) {
    const std::size_t p = omega.size();
    if (!omega_hist.empty()) {
        const auto& prev = omega_hist.back();
        for (std::size_t k = 0; k < grid.phi.size(); ++k) {
            if (!grid.alive[k]) continue;
            for (std::size_t j = 0; j < p; ++j) {
                if (crossed(grid.jet[k].h, prev[j], omega[j])) {
                    grid.alive[k] = 0;
                    break;
                }
            }
        }
    }
    // Strang sweep of exact single-slit maps, half capacity each direction
    for (std::size_t k = 0; k < grid.phi.size(); ++k) {
        if (!grid.alive[k]) continue;
        DerivativeJet j = grid.jet[k];
        bool dead = false;
        try {
            for (std::size_t c = 0; c < p; ++c)
                if (dcap[c] != 0.0) j = apply_frozen(j, omega[c], 0.5 * dcap[c], guard, 0.0);
            for (std::size_t c = p; c-- > 0;)
                if (dcap[c] != 0.0) j = apply_frozen(j, omega[c], 0.5 * dcap[c], guard, 0.0);
        } catch (const SwallowedPointError&) {
            dead = true;
        }
        if (dead) {
            grid.alive[k] = 0;
        } else {
            grid.jet[k] = j;
        }
    }
    omega_hist.push_back(omega);
    dcap_hist.push_back(dcap);
}

DerivativeJet JointFlow::replay(double angle, bool* swallowed) const {
    DerivativeJet j;
    j.h = angle;
    *swallowed = false;
    for (std::size_t s = 0; s < omega_hist.size(); ++s) {
        const auto& om = omega_hist[s];
        const auto& dc = dcap_hist[s];
        if (s > 0) {
            const auto& prev = omega_hist[s - 1];
            for (std::size_t c = 0; c < om.size(); ++c) {
                if (crossed(j.h, prev[c], om[c])) {
                    *swallowed = true;
                    return j;
                }
            }
        }
        try {
            for (std::size_t c = 0; c < om.size(); ++c)
                if (dc[c] != 0.0) j = apply_frozen(j, om[c], 0.5 * dc[c], 1e-12, 0.0);
            for (std::size_t c = om.size(); c-- > 0;)
                if (dc[c] != 0.0) j = apply_frozen(j, om[c], 0.5 * dc[c], 1e-12, 0.0);
        } catch (const SwallowedPointError&) {
            *swallowed = true;
            return j;
        }
    }
    return j;
}

bool JointFlow::insert_point(double angle) {
    bool sw = false;
    DerivativeJet j = replay(angle, &sw);
    if (sw) return false;
    grid.phi.push_back(angle);
    grid.jet.push_back(j);
    grid.alive.push_back(1);
    grid.sort_points();
    return true;
}

MultiSlitState::MultiSlitState(const std::vector<double>& theta0)
    : per_curve_capacity(theta0.size(), 0.0), driving(theta0), rates(theta0.size(), 1.0) {}

void MultiSlitState::step(const std::vector<double>& domega, double dt) {
    const int n = p();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double d = reduce_2pi_pos(driving[j] - driving[i]);
            double gap = std::min(d, TWO_PI - d);
            if (gap < collision_guard) throw CollisionError(i, j, gap);
        }
    }
    for (int j = 0; j < n; ++j) driving[j] += domega[j];
    std::vector<double> dcap(n);
    for (int j = 0; j < n; ++j) dcap[j] = rates[j] * dt;
    joint.step(driving, dcap);
    for (int j = 0; j < n; ++j) {
        per_curve_capacity[j] += dcap[j];
        log_cap += dcap[j];
    }
    common_time += dt;
}

void MultiSlitState::step_single(int j, double dcap) {
    std::vector<double> dc(p(), 0.0);
    dc[j] = dcap;
    joint.step(driving, dc);
    per_curve_capacity[j] += dcap;
    log_cap += dcap;
}

std::string MultiSlitState::snapshot_json() const {
    nlohmann::json out;
    out["common_time"] = common_time;
    out["per_curve_capacity"] = per_curve_capacity;
    out["driving"] = driving;
    out["log_cap"] = log_cap;
    out["m_acc"] = m_acc;
    out["rates"] = rates;
    nlohmann::json spec = nlohmann::json::array();
    for (std::size_t k = 0; k < joint.grid.phi.size(); ++k) {
        if (!joint.grid.alive[k]) continue;
        const auto& j = joint.grid.jet[k];
        spec.push_back({{"angle", joint.grid.phi[k]},
                        {"h", j.h},
                        {"h1", j.h1},
                        {"h2", j.h2},
                        {"h3", j.h3}});
    }
    out["spectator_jets"] = spec;
    return out.dump();
}

DerivativeJet tip_jet_estimate(const SingleSlitFlow& own, const JointFlow& joint, double xi_tip,
                               double fd_step) {
    struct Pair {
        double x;  // own image minus xi_tip
        double y;  // joint image
    };
    std::vector<Pair> lo, hi;
    for (std::size_t k = 0; k < own.grid.phi.size(); ++k) {
        if (!own.grid.alive[k]) continue;
        // locate the same material angle in the joint grid
        auto it = std::lower_bound(joint.grid.phi.begin(), joint.grid.phi.end(),
                                   own.grid.phi[k] - 1e-13);
        std::size_t kj = static_cast<std::size_t>(it - joint.grid.phi.begin());
        if (kj >= joint.grid.phi.size() ||
            std::fabs(joint.grid.phi[kj] - own.grid.phi[k]) > 1e-12 || !joint.grid.alive[kj]) {
            continue;
        }
        double x = own.grid.jet[k].h - xi_tip;
        if (std::fabs(x) > 2.4) continue;
        Pair pr{x, joint.grid.jet[kj].h};
        (x < 0.0 ? lo : hi).push_back(pr);
    }
    auto by_absx = [](const Pair& a, const Pair& b) { return std::fabs(a.x) < std::fabs(b.x); };
    std::sort(lo.begin(), lo.end(), by_absx);
    std::sort(hi.begin(), hi.end(), by_absx);
    if (lo.empty() || hi.empty()) {
        if (std::getenv("SLE_DEBUG_FIT")) {
            std::fprintf(stderr, "empty side: xi=%.5f lo=%zu hi=%zu\n", xi_tip, lo.size(),
                         hi.size());
        }
        throw StencilError("tip_jet_estimate: stencil leaves the tracked range");
    }
    // stencil spread over dyadic offsets fd_step .. 64 fd_step per side:
    // pure nearest-neighbour windows make the higher derivatives
    // noise-dominated, a decade of spread keeps the fit conditioned
    std::vector<Pair> pts;
    // per side: geometric ladder of image offsets starting at that side's
    // floor (the slit-arc image leaves an intrinsic data hole around the
    // tip), with a 2% minimum spacing so compressed piles collapse to one
    // representative
    auto pick_side = [&](std::vector<Pair>& side) {
        int picked = 0;
        if (side.empty()) return 0;
        double floor_x = std::fabs(side.front().x);
        double cap = std::max(std::fabs(side.back().x), floor_x);
        double ratio = std::max(1.3, std::pow(cap / floor_x, 1.0 / 6.0));
        double min_sep = std::max(1e-9, 0.01 * (cap - floor_x));
        double last = 0.0;
        for (int m = 0; m < 9 && picked < 7; ++m) {
            double target = std::min(cap, floor_x * std::pow(ratio, m));
            std::size_t best = side.size();
            double best_d = 1e300;
            for (std::size_t k = 0; k < side.size(); ++k) {
                double ax = std::fabs(side[k].x);
                if (ax <= last + min_sep || ax <= last * 1.0001) continue;
                double d = std::fabs(std::log(ax / target));
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            if (best == side.size()) break;
            pts.push_back(side[best]);
            last = std::fabs(side[best].x);
            ++picked;
        }
        return picked;
    };
    int n_lo = pick_side(lo);
    int n_hi = pick_side(hi);
    std::size_t npts = pts.size();
    if (n_lo < 1 || n_hi < 1 || npts < 3) {
        if (std::getenv("SLE_DEBUG_FIT")) {
            std::fprintf(stderr,
                         "range failure: xi=%.5f lo_raw=%zu hi_raw=%zu picked %d/%d floors "
                         "%.4f/%.4f\n",
                         xi_tip, lo.size(), hi.size(), n_lo, n_hi,
                         lo.empty() ? -1.0 : std::fabs(lo.front().x),
                         hi.empty() ? -1.0 : std::fabs(hi.front().x));
        }
        throw StencilError("tip_jet_estimate: stencil leaves the tracked range");
    }
    double floor_lo = std::fabs(lo.front().x), floor_hi = std::fabs(hi.front().x);
    double span = 0.0;
    for (const auto& pr : pts) span = std::max(span, std::fabs(pr.x));
    int deg = npts >= 10 ? 5 : (npts >= 7 ? 4 : (npts >= 5 ? 3 : 2));
    deg = std::min<int>(deg, static_cast<int>(npts) - 1);
    // a wide data hole makes high-order extrapolation unstable
    if (std::max(floor_lo, floor_hi) > 0.35 * span) deg = std::min(deg, 3);

    double scale = fd_step;
    for (const auto& pr : pts) scale = std::max(scale, std::fabs(pr.x));
    // weighted least squares in x/scale; long double normal equations
    const int m = deg + 1;
    long double A[6][6] = {};
    long double rhs[6] = {};
    for (const auto& pr : pts) {
        long double xs = pr.x / scale;
        long double w = 1.0L / (0.25L + std::fabs((long double)pr.x / scale));
        long double pow_x[6];
        pow_x[0] = 1.0L;
        for (int i = 1; i < m; ++i) pow_x[i] = pow_x[i - 1] * xs;
        for (int i = 0; i < m; ++i) {
            rhs[i] += w * pow_x[i] * pr.y;
            for (int j = 0; j < m; ++j) A[i][j] += w * pow_x[i] * pow_x[j];
        }
    }
    // Gaussian elimination with partial pivoting
    int piv[6];
    for (int i = 0; i < m; ++i) piv[i] = i;
    for (int c = 0; c < m; ++c) {
        int best = c;
        for (int r = c + 1; r < m; ++r)
            if (std::fabs((double)A[r][c]) > std::fabs((double)A[best][c])) best = r;
        if (best != c) {
            for (int j = 0; j < m; ++j) std::swap(A[c][j], A[best][j]);
            std::swap(rhs[c], rhs[best]);
        }
        if (A[c][c] == 0.0L) throw StencilError("tip_jet_estimate: singular fit");
        for (int r = c + 1; r < m; ++r) {
            long double f = A[r][c] / A[c][c];
            for (int j = c; j < m; ++j) A[r][j] -= f * A[c][j];
            rhs[r] -= f * rhs[c];
        }
    }
    long double coef[6] = {};
    for (int r = m - 1; r >= 0; --r) {
        long double s = rhs[r];
        for (int j = r + 1; j < m; ++j) s -= A[r][j] * coef[j];
        coef[r] = s / A[r][r];
    }
    DerivativeJet out;
    out.h = static_cast<double>(coef[0]);
    out.h1 = static_cast<double>(coef[1]) / scale;
    out.h2 = 2.0 * static_cast<double>(coef[2]) / (scale * scale);
    out.h3 = 6.0 * static_cast<double>(coef[3]) / (scale * scale * scale);
    if (!(out.h1 > 0.0) || out.h1 > 1.3) {
        if (std::getenv("SLE_DEBUG_FIT")) {
            std::fprintf(stderr, "fit failure: xi=%.6f h=%.6f h1=%.6f h2=%.3f scale=%.4f\n",
                         xi_tip, out.h, out.h1, out.h2, scale);
            for (const auto& pr : pts)
                std::fprintf(stderr, "  x=%+.6e y=%.8f\n", pr.x, pr.y);
        }
        throw StencilError("tip_jet_estimate: derivative left (0,1] beyond tolerance");
    }
    out.h1 = std::min(std::max(out.h1, 0.02), 1.0);
    return out;
}

std::vector<std::vector<double>> common_to_multi_time(
    const std::vector<std::vector<double>>& h1_tip, double dt) {
    std::vector<std::vector<double>> out(h1_tip.size());
    for (std::size_t j = 0; j < h1_tip.size(); ++j) {
        const auto& h = h1_tip[j];
        out[j].resize(h.size());
        double acc = 0.0;
        out[j][0] = 0.0;
        for (std::size_t k = 1; k < h.size(); ++k) {
            auto rate = [&](double h1) {
                if (!(h1 > 0.0) || h1 > 1.0 + 1e-6) {
                    throw std::runtime_error("common_to_multi_time: h1 outside (0,1]");
                }
                double c = std::min(h1, 1.0);
                return 1.0 / (c * c);
            };
            acc += 0.5 * dt * (rate(h[k - 1]) + rate(h[k]));
            out[j][k] = acc;
        }
    }
    return out;
}

CurveTrace trace_paths(const std::vector<std::vector<double>>& xi_cols, double dt,
                       std::size_t stride, const std::vector<double>& rates) {
    const std::size_t p = xi_cols.size();
    CurveTrace tr;
    tr.points.resize(p);
    if (p == 0 || xi_cols[0].empty()) return tr;
    const std::size_t nsteps = xi_cols[0].size() - 1;
    for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t k = 0; k <= nsteps; k += stride) {
            cplx z = std::polar(1.0, xi_cols[c][k]);
            for (std::size_t m = k; m-- > 0;) {
                for (std::size_t j = 0; j < p; ++j) {
                    z = reverse_step_exact(z, xi_cols[j][m], rates[j] * dt);
                }
            }
            if (std::abs(z) > 1.0 + 1e-6) {
                throw std::runtime_error("trace_paths: reverse flow left the disc");
            }
            tr.points[c].push_back({k * dt, z});
        }
    }
    return tr;
}

}  // namespace sle
