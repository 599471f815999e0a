#include "sle/partition.hpp"

#include <cmath>
#include <stdexcept>

namespace sle {

AngleConfig::AngleConfig(std::vector<double> a) : angles(std::move(a)) {
    for (std::size_t j = 0; j + 1 < angles.size(); ++j) {
        if (!(angles[j] < angles[j + 1])) {
            throw std::domain_error("AngleConfig: angles must be strictly increasing");
        }
    }
    if (angles.size() >= 2 && !(angles.back() < angles.front() + TWO_PI)) {
        throw std::domain_error("AngleConfig: angles must span less than 2*pi");
    }
    for (double a2 : angles) {
        if (!std::isfinite(a2)) throw std::domain_error("AngleConfig: non-finite angle");
    }
}

PartitionValue z_multiradial(double kappa, double mu, const AngleConfig& ac) {
    const auto& th = ac.angles;
    const int p = ac.p();
    PartitionValue out;
    out.grad.assign(p, 0.0);
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            out.log_abs += (2.0 / kappa) * log_chord(th[j], th[i]);
            double c = cot_half(th[j] - th[i]) / kappa;
            out.grad[j] += c;
            out.grad[i] -= c;
        }
        out.log_abs += (mu / kappa) * th[i];
        out.grad[i] += mu / kappa;
    }
    return out;
}

PartitionValue z_radial_rho(double kappa, double mu, const std::vector<double>& rho,
                            const AngleConfig& ac) {
    const auto& th = ac.angles;
    const int p = ac.p();
    if (static_cast<int>(rho.size()) != p - 1) {
        throw std::domain_error("z_radial_rho: need p-1 weights");
    }
    // rho_1 = 2 by convention; pair exponents rho_l/kappa against theta^1 and
    // rho_l rho_j / (2 kappa) among the force points
    std::vector<double> w(p);
    w[0] = 2.0;
    for (int j = 1; j < p; ++j) w[j] = rho[j - 1];

    PartitionValue out;
    out.grad.assign(p, 0.0);
    for (int i = 0; i < p; ++i) {
        out.log_abs += (mu / kappa) * 0.5 * w[i] * th[i];
        out.grad[i] += (mu / kappa) * 0.5 * w[i];
        for (int j = i + 1; j < p; ++j) {
            double e = 0.5 * w[i] * w[j] / kappa;
            out.log_abs += e * log_chord(th[j], th[i]);
            double c = 0.5 * e * cot_half(th[j] - th[i]);
            out.grad[j] += c;
            out.grad[i] -= c;
        }
    }
    return out;
}

PartitionValue z_shuffle(double kappa, const AngleConfig& ac) {
    return z_multiradial(kappa, 0.0, ac);
}

PartitionValue z_fusion(double kappa, const AngleConfig& starts, const BoundaryAngle& target) {
    const auto& th = starts.angles;
    const int n = starts.p();
    const double expo = 1.0 - (2.0 / kappa) * (n + 2.0);
    PartitionValue out;
    out.grad.assign(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            out.log_abs += (2.0 / kappa) * log_chord(th[j], th[i]);
            double c = cot_half(th[j] - th[i]) / kappa;
            out.grad[j] += c;
            out.grad[i] -= c;
        }
        out.log_abs += expo * log_chord(target.theta, th[i]);
        double c = 0.5 * expo * cot_half(target.theta - th[i]);
        out.grad[n] += c;
        out.grad[i] -= c;
    }
    return out;
}

PartitionValue z_multiradial_interior(double kappa, double mu, const AngleConfig& ac,
                                      const DiscPoint& z) {
    const auto u = exponents(kappa);
    const int p = ac.p();
    const double hp = u.h(p);
    PartitionValue base = z_multiradial(kappa, mu, ac);
    double cr = conformal_radius_disc(z);
    double log_abs = base.log_abs;
    log_abs += (hp - (u.b_tilde + (p * p - 1.0) / (2.0 * kappa) - mu * mu / (2.0 * kappa))) *
               std::log(cr);
    double spiral_arg = 0.0;
    for (double th : ac.angles) {
        double d = std::abs(z.z() - std::polar(1.0, th));
        if (d <= 0.0) throw std::domain_error("z_multiradial_interior: z on a marked point");
        log_abs -= (2.0 / p) * hp * std::log(d);
        spiral_arg += std::arg(1.0 - z.z() * std::polar(1.0, -th));
    }
    log_abs += (2.0 * mu / kappa) * spiral_arg;
    PartitionValue out;
    out.log_abs = log_abs;
    return out;
}

double z_fusion_halfplane_log(double kappa, const std::vector<double>& xs, double y) {
    const int n = static_cast<int>(xs.size());
    double log_abs = z_shuffle_halfplane_log(kappa, xs);
    const double expo = 1.0 - (2.0 / kappa) * (n + 2.0);
    for (double x : xs) {
        if (!(y != x)) throw std::domain_error("z_fusion_halfplane: coincident points");
        log_abs += expo * std::log(std::fabs(y - x));
    }
    return log_abs;
}

double z_shuffle_halfplane_log(double kappa, const std::vector<double>& xs) {
    double log_abs = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            double d = std::fabs(xs[j] - xs[i]);
            if (d <= 0.0) throw std::domain_error("z_shuffle_halfplane: coincident points");
            log_abs += (2.0 / kappa) * std::log(d);
        }
    }
    return log_abs;
}

PartitionEvaluator make_multiradial_evaluator(double kappa, double mu, int p) {
    PartitionEvaluator pe;
    pe.slot_weights.assign(p, exponents(kappa).b);
    pe.eval = [kappa, mu](const std::vector<double>& th) {
        return z_multiradial(kappa, mu, AngleConfig(th));
    };
    return pe;
}

PartitionEvaluator make_radial_rho_evaluator(double kappa, double mu, std::vector<double> rho,
                                             int p) {
    PartitionEvaluator pe;
    pe.slot_weights.assign(p, exponents(kappa).b);
    pe.eval = [kappa, mu, rho](const std::vector<double>& th) {
        return z_radial_rho(kappa, mu, rho, AngleConfig(th));
    };
    return pe;
}

PartitionEvaluator make_fusion_evaluator(double kappa, int n) {
    PartitionEvaluator pe;
    pe.slot_weights.assign(n + 1, exponents(kappa).b);
    pe.slot_weights[n] = exponents(kappa).h(n);
    pe.eval = [kappa, n](const std::vector<double>& th) {
        AngleConfig starts(std::vector<double>(th.begin(), th.begin() + n));
        return z_fusion(kappa, starts, BoundaryAngle{th[n]});
    };
    return pe;
}

double bpz_residual(const PartitionEvaluator& Z, const std::vector<double>& angles, int j,
                    double kappa, double target_constant, double fd_step) {
    const int m = static_cast<int>(angles.size());
    if (j < 0 || j >= m) throw std::domain_error("bpz_residual: slot out of range");
    for (int i = 0; i < m; ++i) {
        if (i != j && std::fabs(std::sin(0.5 * (angles[i] - angles[j]))) < 10.0 * fd_step) {
            throw std::domain_error("bpz_residual: configuration too close to collision");
        }
    }
    std::vector<double> up = angles, dn = angles;
    up[j] += fd_step;
    dn[j] -= fd_step;
    PartitionValue v0 = Z.eval(angles);
    PartitionValue vp = Z.eval(up);
    PartitionValue vm = Z.eval(dn);
    // Z''/Z = d2 log|Z| + (d log|Z|)^2, with d2 from the analytic gradient
    double d1 = v0.grad[j];
    double d2 = (vp.grad[j] - vm.grad[j]) / (2.0 * fd_step);
    double res = 0.5 * kappa * (d2 + d1 * d1);
    for (int i = 0; i < m; ++i) {
        if (i == j) continue;
        double diff = angles[i] - angles[j];
        res += cot_half(diff) * v0.grad[i];
        res -= 0.5 * Z.slot_weights[i] * csc2_half(diff);
    }
    return res - target_constant;
}

}  // namespace sle
