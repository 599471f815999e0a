// partition.hpp
// closed-form partition functions, their gradients (= SDE drifts),
// covariant interior-point extensions, and the radial BPZ residual
#ifndef SLE_PARTITION_HPP
#define SLE_PARTITION_HPP

#include <functional>
#include <vector>

#include "sle/conformal.hpp"
#include "sle/exponents.hpp"
#include "sle/util.hpp"

namespace sle {

// ordered angles theta^1 < ... < theta^p < theta^1 + 2*pi
struct AngleConfig {
    std::vector<double> angles;

    AngleConfig() = default;
    explicit AngleConfig(std::vector<double> a);
    int p() const { return static_cast<int>(angles.size()); }
};

struct PartitionValue {
    double log_abs = 0.0;
    double phase = 0.0;  // 0 for positive values, pi for negative
    std::vector<double> grad;  // d log|Z| / d theta^j

    double value() const { return std::cos(phase) * std::exp(log_abs); }
};

// evaluator together with the BPZ weight carried by each angle slot
struct PartitionEvaluator {
    std::function<PartitionValue(const std::vector<double>&)> eval;
    std::vector<double> slot_weights;  // b for curve slots, h_n for a fusion target
};

// Z^mu_p, Eq. (8)/(10): prod |e^{i th_j} - e^{i th_i}|^{2/k} * exp((mu/k) sum th_j)
PartitionValue z_multiradial(double kappa, double mu, const AngleConfig& ac);

// radial SLE_k^mu(rho) partition function with rho_1 = 2 convention
PartitionValue z_radial_rho(double kappa, double mu, const std::vector<double>& rho,
                            const AngleConfig& ac);

// half-watermelon partition function on the disc: n start angles + target
PartitionValue z_fusion(double kappa, const AngleConfig& starts, const BoundaryAngle& target);

// Z_shuffle on the disc: prod |e^{i th_j} - e^{i th_i}|^{2/k}
PartitionValue z_shuffle(double kappa, const AngleConfig& ac);

// Z^mu_p with a general interior point z (the A^mu / CR / chord form)
PartitionValue z_multiradial_interior(double kappa, double mu, const AngleConfig& ac,
                                      const DiscPoint& z);

// half-plane forms, used by the disc/half-plane consistency checks
double z_fusion_halfplane_log(double kappa, const std::vector<double>& xs, double y);
double z_shuffle_halfplane_log(double kappa, const std::vector<double>& xs);

PartitionEvaluator make_multiradial_evaluator(double kappa, double mu, int p);
PartitionEvaluator make_radial_rho_evaluator(double kappa, double mu, std::vector<double> rho,
                                             int p);
PartitionEvaluator make_fusion_evaluator(double kappa, int n);

// residual of the radial BPZ equation in slot j against target_constant;
// second derivative by central differences of the analytic gradient
double bpz_residual(const PartitionEvaluator& Z, const std::vector<double>& angles, int j,
                    double kappa, double target_constant, double fd_step = 1e-5);

}  // namespace sle

#endif
