#include "sle/rainbow.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>

#include "sle/special.hpp"

namespace sle {

namespace {

// Gauss-Legendre nodes/weights on [-1,1], cached per order
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

struct PathPiece {
    bool is_arc = false;
    cplx a, b;          // line endpoints
    cplx center;        // arc data
    double radius = 0.0, phi0 = 0.0, phi1 = 0.0;

    cplx point(double s) const {  // s in [0,1]
        if (!is_arc) return a + s * (b - a);
        double phi = phi0 + s * (phi1 - phi0);
        return center + std::polar(radius, phi);
    }
    cplx tangent(double s) const {  // d point / d s
        if (!is_arc) return b - a;
        double phi = phi0 + s * (phi1 - phi0);
        return std::polar(radius, phi) * cplx(0.0, 1.0) * (phi1 - phi0);
    }
};

// figure-eight around (A, B) based at (m, -delta): counterclockwise circle
// around A, clockwise circle around B, joined by legs at depth delta. Long
// legs are subdivided relative to the depth so the quadrature nodes resolve
// branch-point passages mid-leg.
std::vector<PathPiece> build_eight(double A, double B, double m, double delta, double rho) {
    double off = std::sqrt(rho * rho - delta * delta);
    cplx base(m, -delta);
    cplx entA(A + off, -delta), entB(B - off, -delta);
    double phiA = std::atan2(-delta, off);        // entry angle on circle A
    double phiB = std::atan2(-delta, -off);        // entry angle on circle B (near -pi)
    if (phiB > 0.0) phiB -= TWO_PI;
    std::vector<PathPiece> path;
    auto add_line = [&](cplx a, cplx b) {
        int nsub = std::min(10, std::max(1, (int)std::ceil(std::abs(b - a) / (4.0 * delta))));
        for (int s = 0; s < nsub; ++s) {
            PathPiece p;
            p.a = a + (double(s) / nsub) * (b - a);
            p.b = a + (double(s + 1) / nsub) * (b - a);
            path.push_back(p);
        }
    };
    add_line(base, entA);
    PathPiece cA; cA.is_arc = true; cA.center = cplx(A, 0.0); cA.radius = rho;
    cA.phi0 = phiA; cA.phi1 = phiA + TWO_PI; path.push_back(cA);
    add_line(entA, base);
    add_line(base, entB);
    PathPiece cB; cB.is_arc = true; cB.center = cplx(B, 0.0); cB.radius = rho;
    cB.phi0 = phiB; cB.phi1 = phiB - TWO_PI; path.push_back(cB);
    add_line(entB, base);
    return path;
}

double unwrap(double raw, double prev) {
    return raw + TWO_PI * std::round((prev - raw) / TWO_PI);
}

// branch-tracked log of (w - z): magnitude exact, argument continued
struct TrackedLog {
    cplx z;
    double expo;
    double arg = 0.0;
    void seed(cplx w) { arg = std::atan2((w - z).imag(), (w - z).real()); }
    cplx log_at(cplx w) {
        cplx d = w - z;
        arg = unwrap(std::atan2(d.imag(), d.real()), arg);
        return cplx(std::log(std::abs(d)), arg);
    }
};

struct EightGeometry {
    double A, B, m, delta, rho;
};

// integrand factors for one screening variable: four marked points with
// exponent a plus (for the inner variable) the pair factor against w1
struct VarFactors {
    std::vector<TrackedLog> logs;  // point factors
    double pair_expo = 0.0;        // 8/kappa for the inner variable
};

struct Quad {
    std::vector<double> xs, ws;
    explicit Quad(int n) { gauss_legendre(n, xs, ws); }
};

// traverse one eight for the inner variable w2 at fixed w1
cplx inner_eight(const EightGeometry& g, const std::vector<double>& pts, double a_expo,
                 double pair_expo, cplx w1, double pair_anchor_arg, const Quad& q) {
    std::vector<PathPiece> path = build_eight(g.A, g.B, g.m, g.delta, g.rho);
    std::vector<TrackedLog> logs;
    for (double p : pts) logs.push_back({cplx(p, 0.0), a_expo});
    TrackedLog pair{w1, pair_expo, pair_anchor_arg};
    cplx start = path.front().point(0.0);
    for (auto& L : logs) L.seed(start);
    // the pair factor arrives pre-seeded (continued in the outer variable)
    cplx total = 0.0;
    for (const auto& piece : path) {
        for (std::size_t k = 0; k < q.xs.size(); ++k) {
            double s = 0.5 * (q.xs[k] + 1.0);
            cplx w = piece.point(s);
            cplx expsum = 0.0;
            for (auto& L : logs) expsum += L.expo * L.log_at(w);
            expsum += pair.expo * pair.log_at(w);
            total += 0.5 * q.ws[k] * std::exp(expsum) * piece.tangent(s);
        }
    }
    return total;
}

struct EngineResult {
    cplx value;
};

EngineResult run_engine(int n, double kappa, const std::vector<double>& xs,
                        const std::vector<double>& ys, int nodes) {
    const double a = -4.0 / kappa;
    const double rho_e = 8.0 / kappa;
    Quad q(nodes);
    if (n == 1) {
        const double A = xs[0], B = ys[0];
        EightGeometry g{A, B, 0.5 * (A + B), 0.1 * (B - A), 0.2 * (B - A)};
        std::vector<PathPiece> path = build_eight(g.A, g.B, g.m, g.delta, g.rho);
        std::vector<TrackedLog> logs = {{cplx(A, 0.0), a}, {cplx(B, 0.0), a}};
        cplx start = path.front().point(0.0);
        for (auto& L : logs) L.seed(start);
        cplx total = 0.0;
        for (const auto& piece : path) {
            for (std::size_t k = 0; k < q.xs.size(); ++k) {
                double s = 0.5 * (q.xs[k] + 1.0);
                cplx w = piece.point(s);
                cplx expsum = 0.0;
                for (auto& L : logs) expsum += L.expo * L.log_at(w);
                total += 0.5 * q.ws[k] * std::exp(expsum) * piece.tangent(s);
            }
        }
        // anchor phase: at (m, -0): (m-A) positive, (m-B) negative
        cplx anchor_phase = std::exp(cplx(0.0, -a * (-PI)));
        return {total * anchor_phase};
    }

    // n == 2: the rainbow cycle is evaluated after the Mobius move
    // u -> -1/(u - c) with c inside (x1, x2), which carries the nested links
    // {x1,y1},{x2,y2} onto the adjacent links {A,B},{C,D} with
    // A < B < C < D; the adjacent cycle is a product of two disjoint
    // figure-eights, so no second solution channel can mix in
    const double A = xs[0], B = ys[0], C = ys[1], D = xs[1];
    double rho1 = std::min(0.3 * (B - A), 0.3 * (C - B));
    double delta1 = 0.6 * rho1;
    double rho2 = std::min({0.3 * (D - C), 0.3 * (C - B), rho1});
    double delta2 = 0.5 * rho2;
    if (!(rho2 > 0.0)) throw QuadratureError("rainbow: contour geometry failed");
    EightGeometry g1{A, B, 0.5 * (A + B), delta1, rho1};
    EightGeometry g2{C, D, 0.5 * (C + D), delta2, rho2};
    std::vector<double> marked = {A, B, C, D};

    std::vector<PathPiece> outer = build_eight(g1.A, g1.B, g1.m, g1.delta, g1.rho);
    std::vector<TrackedLog> logs1;
    for (double p : marked) logs1.push_back({cplx(p, 0.0), a});
    cplx start1 = outer.front().point(0.0);
    for (auto& L : logs1) L.seed(start1);

    cplx inner_start = cplx(g2.m, -g2.delta);
    double pair_arg_prev =
        std::atan2((inner_start - start1).imag(), (inner_start - start1).real());

    cplx total = 0.0;
    for (const auto& piece : outer) {
        for (std::size_t k = 0; k < q.xs.size(); ++k) {
            double s = 0.5 * (q.xs[k] + 1.0);
            cplx w1 = piece.point(s);
            cplx expsum = 0.0;
            for (auto& L : logs1) expsum += L.expo * L.log_at(w1);
            double pair_anchor =
                unwrap(std::atan2((inner_start - w1).imag(), (inner_start - w1).real()),
                       pair_arg_prev);
            pair_arg_prev = pair_anchor;
            cplx inner = inner_eight(g2, marked, a, rho_e, w1, pair_anchor, q);
            total += 0.5 * q.ws[k] * std::exp(expsum) * inner * piece.tangent(s);
        }
    }
    // anchor phases at (m1, m2): m1 in (A,B) leaves (m1-B),(m1-C),(m1-D)
    // negative; m2 in (C,D) leaves (m2-D) negative; pair (m2-m1) > 0
    double phase0 = a * (-PI) * 3.0 + a * (-PI);
    return {total * std::exp(cplx(0.0, -phase0))};
}


// ---- n = 2: pure-rainbow combination of the two product cycles ----------
// The screening contours factorize into two computable product cycles: the
// adjacent product (disjoint eights around [u1,u2] and [u3,u4]) and the
// nested product (the same object after the Mobius move -1/(u-c) with c in
// the first gap). The identity channel of the end collapse cancels in the
// combination [2]_q * E_nested + E_pair, and the overall normalization is
// fixed by the inner-link collapse against the n = 1 value.

cplx adjacent_cycle_impl(double kappa, const std::vector<double>& pts, int nodes);

double nested_cycle(double kappa, const std::vector<double>& u, int nodes) {
    const double b = exponents(kappa).b;
    double c = 0.5 * (u[0] + u[1]);
    std::vector<double> img;
    double log_cov = 0.0;
    for (double x : u) {
        img.push_back(-1.0 / (x - c));
        log_cov += b * std::log(1.0 / ((x - c) * (x - c)));
    }
    std::sort(img.begin(), img.end());
    return std::exp(log_cov) * adjacent_cycle_impl(kappa, img, nodes).real();
}

double rainbow_pair_value(double kappa, const std::vector<double>& u, int nodes) {
    double q2 = 2.0 * std::cos(4.0 * PI / kappa);  // [2]_q
    return q2 * nested_cycle(kappa, u, nodes) +
           adjacent_cycle_impl(kappa, u, nodes).real();
}

// coefficient of the g^{e0} channel from a four-point ladder in g
double lead_channel(const std::array<double, 4>& vals, const std::array<double, 4>& gs,
                    const std::array<double, 4>& expos) {
    long double M[4][5];
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) M[r][c] = std::pow((long double)gs[r], (long double)expos[c]);
        M[r][4] = vals[r];
    }
    for (int c = 0; c < 4; ++c) {
        int best = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::fabs((double)M[r][c]) > std::fabs((double)M[best][c])) best = r;
        for (int j = 0; j < 5; ++j) std::swap(M[c][j], M[best][j]);
        for (int r = c + 1; r < 4; ++r) {
            long double f = M[r][c] / M[c][c];
            for (int j = c; j < 5; ++j) M[r][j] -= f * M[c][j];
        }
    }
    long double sol[4];
    for (int r = 3; r >= 0; --r) {
        long double s = M[r][4];
        for (int j = r + 1; j < 4; ++j) s -= M[r][j] * sol[j];
        sol[r] = s / M[r][r];
    }
    return (double)sol[0];
}

double calibrate_rainbow_norm(double kappa) {
    const double b = exponents(kappa).b;
    std::array<double, 4> expos = {-2.0 * b, -2.0 * b + 1.0, 2.0 / kappa, 2.0 / kappa + 1.0};
    std::array<double, 4> gs = {0.16, 0.08, 0.04, 0.02};
    const double x1 = 0.0, y1c = 2.5, v = 1.1;
    std::array<double, 4> vals;
    for (int r = 0; r < 4; ++r) {
        double g = gs[r];
        vals[r] = rainbow_pair_value(kappa, {x1, v - 0.5 * g, v + 0.5 * g, y1c}, 128);
    }
    double lead = lead_channel(vals, gs, expos);
    if (!(std::fabs(lead) > 0.0)) {
        throw QuadratureError("rainbow calibration: vanishing inner-collapse channel");
    }
    return std::pow(y1c - x1, -2.0 * b) / lead;
}

double rainbow_norm(double kappa) {
    static std::map<double, double> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(kappa);
    if (it == cache.end()) it = cache.emplace(kappa, calibrate_rainbow_norm(kappa)).first;
    return it->second;
}

cplx adjacent_cycle_impl(double kappa, const std::vector<double>& pts, int nodes) {
    EngineResult er = run_engine(2, kappa, {pts[0], pts[3]}, {pts[1], pts[2]}, nodes);
    double s1 = selberg_constant(1, kappa);
    cplx qm2 = std::polar(1.0, -8.0 * PI / kappa);
    cplx k2 = std::pow(cplx(1.0, 0.0) / (s1 * (qm2 - 1.0)), 2);
    double lp = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) lp += (2.0 / kappa) * std::log(pts[j] - pts[i]);
    return k2 * er.value * std::exp(lp);
}

}  // namespace

// raw adjacent product cycle over four ascending points (A<B<C<D): w1 on a
// figure-eight around [A,B], w2 around [C,D]; all-pairs chord prefactor
// included, K_2 normalization included
cplx rainbow_adjacent_cycle(double kappa, const std::vector<double>& pts, int nodes) {
    return adjacent_cycle_impl(kappa, pts, nodes);
}

namespace {

double log_prefactor(double kappa, const std::vector<double>& xs,
                     const std::vector<double>& ys) {
    // prod (x_j - x_i)^{2/k} (y_j - y_i)^{2/k} prod (y_j - x_i)^{2/k}
    double lp = 0.0;
    const double e = 2.0 / kappa;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) lp += e * std::log(xs[j] - xs[i]);
    for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t j = i + 1; j < ys.size(); ++j) lp += e * std::log(std::fabs(ys[j] - ys[i]));
    for (double x : xs)
        for (double y : ys) lp += e * std::log(y - x);
    return lp;
}

}  // namespace

PartitionValue rainbow_numeric(int n, double kappa, const std::vector<double>& xs,
                               const std::vector<double>& ys, const RainbowOptions& opt) {
    if (n != 1 && n != 2) throw std::domain_error("rainbow_numeric: n must be 1 or 2");
    if (!(kappa > 4.0 && kappa < 8.0)) throw std::domain_error("rainbow_numeric: kappa outside (4,8)");
    if (static_cast<int>(xs.size()) != n || static_cast<int>(ys.size()) != n) {
        throw std::domain_error("rainbow_numeric: need n starts and n ends");
    }
    // ys ascending, i.e. ys[0] = y^n, ..., ys[n-1] = y^1
    std::vector<double> ordered;
    for (double x : xs) ordered.push_back(x);
    for (double y : ys) ordered.push_back(y);
    std::vector<double> ys_inc(ys);
    for (std::size_t k = 0; k + 1 < ordered.size(); ++k) {
        if (!(ordered[k] < ordered[k + 1])) {
            throw std::domain_error("rainbow_numeric: points must satisfy x1<..<xn<yn<..<y1");
        }
    }

    // normalization from the fused/collapsed-link identities:
    // K_n = [S_1 (q^{-2} - 1)]^{-n}
    double s1 = selberg_constant(1, kappa);
    cplx qm2 = std::polar(1.0, -8.0 * PI / kappa);
    cplx kn = std::pow(cplx(1.0, 0.0) / (s1 * (qm2 - 1.0)), n);

    cplx prev = 0.0;
    bool have_prev = false;
    if (n == 2) {
        // pure-rainbow sector combination; coefficients are calibrated once
        // per kappa from the collapse asymptotics and cached
        double norm = rainbow_norm(kappa);
        std::vector<double> pts = {xs[0], xs[1], ys_inc[0], ys_inc[1]};
        double before = 0.0;
        bool converged = false;
        for (int nodes = 64; nodes <= opt.max_nodes; nodes *= 2) {
            double s = norm * rainbow_pair_value(kappa, pts, nodes);
            if (nodes > 64 && std::fabs(s - before) <= opt.rel_tol * std::fabs(s)) {
                before = s;
                converged = true;
                break;
            }
            before = s;
        }
        if (!converged && opt.max_nodes > 128) {
            throw QuadratureError("rainbow_numeric: quadrature did not converge");
        }
        PartitionValue out;
        out.log_abs = std::log(std::fabs(before));
        out.phase = before >= 0.0 ? 0.0 : PI;
        return out;
    }
    cplx val = 0.0;
    for (int nodes = 64; nodes <= opt.max_nodes; nodes *= 2) {
        EngineResult er = run_engine(n, kappa, xs, ys_inc, nodes);
        val = kn * er.value;
        if (have_prev && std::abs(val - prev) <= opt.rel_tol * std::abs(val)) {
            prev = val;
            break;
        }
        prev = val;
        have_prev = true;
        if (nodes * 2 > opt.max_nodes) {
            throw QuadratureError("rainbow_numeric: quadrature did not converge");
        }
    }
    cplx full = prev * std::exp(log_prefactor(kappa, xs, ys_inc));
    if (std::abs(full.imag()) > opt.imag_tol * std::abs(full)) {
        throw BranchTrackingError("rainbow_numeric: imaginary residue " +
                                  std::to_string(full.imag() / std::abs(full)));
    }
    PartitionValue out;
    double v = full.real();
    out.log_abs = std::log(std::fabs(v));
    out.phase = v >= 0.0 ? 0.0 : PI;
    return out;
}

double rainbow_chordal_bpz_residual(int n, double kappa, const std::vector<double>& xs,
                                    const std::vector<double>& ys, int j, double fd_step) {
    const double b = exponents(kappa).b;
    const int m = 2 * n;
    std::vector<double> u;
    for (double x : xs) u.push_back(x);
    for (double y : ys) u.push_back(y);  // ascending overall

    RainbowOptions opt;
    opt.rel_tol = 1e-11;
    opt.max_nodes = 1024;
    auto zval = [&](const std::vector<double>& pts) {
        std::vector<double> xs2(pts.begin(), pts.begin() + n);
        std::vector<double> ys2(pts.begin() + n, pts.end());
        return rainbow_numeric(n, kappa, xs2, ys2, opt).value();
    };
    auto d1 = [&](int i, double h) {
        std::vector<double> up = u, dn = u;
        up[i] += h;
        dn[i] -= h;
        return (zval(up) - zval(dn)) / (2.0 * h);
    };
    auto d2 = [&](int i, double h) {
        std::vector<double> up = u, dn = u;
        up[i] += h;
        dn[i] -= h;
        return (zval(up) - 2.0 * zval(u) + zval(dn)) / (h * h);
    };
    // one Richardson level on the finite differences
    auto rich = [&](const std::function<double(double)>& f) {
        double c = f(fd_step), fh = f(0.5 * fd_step);
        return (4.0 * fh - c) / 3.0;
    };
    double z0 = zval(u);
    double res = 0.5 * kappa * rich([&](double h) { return d2(j, h); });
    for (int i = 0; i < m; ++i) {
        if (i == j) continue;
        double di = rich([&](double h) { return d1(i, h); });
        res += 2.0 * di / (u[i] - u[j]);
        res -= 2.0 * b * z0 / ((u[i] - u[j]) * (u[i] - u[j]));
    }
    return res / z0;
}

double rainbow_ratio_r(int n, double kappa, const std::vector<double>& xs,
                       const std::vector<double>& ys) {
    // R(H; 0, x, y, inf) = (prod y^j)^{(2/k)(n+2)-1} Z_rainbow / (Zsh(x) Zsh(y))
    PartitionValue z = rainbow_numeric(n, kappa, xs, ys);
    double lr = z.log_abs;
    for (double y : ys) lr += ((2.0 / kappa) * (n + 2.0) - 1.0) * std::log(y);
    lr -= z_shuffle_halfplane_log(kappa, xs);
    lr -= z_shuffle_halfplane_log(kappa, ys);
    return std::cos(z.phase) * std::exp(lr);
}

}  // namespace sle
