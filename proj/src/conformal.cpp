#include "sle/conformal.hpp"

#include <cmath>

namespace sle {

double conformal_radius_disc(const DiscPoint& z) {
    double r2 = z.abs2();
    if (r2 >= 1.0) throw std::domain_error("conformal_radius_disc: |z| >= 1");
    return 1.0 - r2;
}

double poisson_kernel_interior(const BoundaryAngle& theta, const DiscPoint& z) {
    double r2 = z.abs2();
    if (r2 >= 1.0) throw std::domain_error("poisson_kernel_interior: |z| >= 1");
    double d2 = std::norm(z.z() - theta.point());
    return (1.0 - r2) / d2;
}

double boundary_poisson(const BoundaryAngle& theta, const BoundaryAngle& vartheta) {
    double s = std::sin(0.5 * reduce_pi(vartheta.theta - theta.theta));
    if (s == 0.0) throw std::domain_error("boundary_poisson: coincident points");
    return 1.0 / (4.0 * s * s);
}

MobiusToOrigin::MobiusToOrigin(const DiscPoint& z0) : z0_(z0.z()) {
    if (z0.abs2() >= 1.0) throw std::domain_error("MobiusToOrigin: |z0| >= 1");
}

cplx MobiusToOrigin::eval(cplx w) const { return (w - z0_) / (1.0 - std::conj(z0_) * w); }

cplx MobiusToOrigin::deriv(cplx w) const {
    cplx d = 1.0 - std::conj(z0_) * w;
    return (1.0 - std::norm(z0_)) / (d * d);
}

namespace {

// Koebe map w / (1-w)^2 : U -> C minus (-inf, -1/4]
cplx koebe(cplx w) {
    cplx d = 1.0 - w;
    return w / (d * d);
}

cplx koebe_deriv(cplx w) {
    cplx d = 1.0 - w;
    return (1.0 + w) / (d * d * d);
}

// inverse of zeta = 2 eta / (1 + eta^2) on C minus ((-inf,-1] u [1,inf)),
// branch with |eta| < 1 and eta ~ zeta/2 near 0. The caller supplies
// 1 - zeta^2 in a cancellation-free product form.
cplx two_ray_inv(cplx zeta, cplx one_minus_z2) {
    if (std::abs(zeta) < 1e-5) {
        cplx z2 = zeta * zeta;
        return zeta * (0.5 + 0.125 * z2 + 0.0625 * z2 * z2);
    }
    return (1.0 - std::sqrt(one_minus_z2)) / zeta;
}

cplx two_ray_inv_deriv(cplx zeta, cplx one_minus_z2) {
    if (std::abs(zeta) < 1e-5) {
        cplx z2 = zeta * zeta;
        return 0.5 + 0.375 * z2 + 0.3125 * z2 * z2;
    }
    cplx rt = std::sqrt(one_minus_z2);
    cplx eta = (1.0 - rt) / zeta;
    // d eta / d zeta = (eta/zeta) * (1/rt)  [from eta^2 - (2/zeta) eta + 1 = 0]
    return eta / (zeta * rt);
}

}  // namespace

SlitHullMap::SlitHullMap(const SlitHull& hull) : alpha_(hull.anchor.theta) {
    if (!(hull.depth > 0.0 && hull.depth < 1.0)) {
        throw std::domain_error("SlitHullMap: depth must lie in (0,1)");
    }
    s_ = 1.0 - hull.depth;
    B_ = s_ / ((1.0 - s_) * (1.0 - s_));
    // 1 +- zeta0 in product form: zeta0 is very close to -1 for shallow slits
    double zeta0 = (0.25 - B_) / (0.25 + B_);
    double wp0 = 0.5 / (B_ + 0.25);
    double wm0 = 2.0 * B_ / (B_ + 0.25);
    double s20 = std::sqrt(wp0 * wm0);
    eta0_ = (1.0 - s20) / zeta0;
    double one_m = (-wm0 + s20) / zeta0;  // 1 - eta0
    double one_p = (wp0 - s20) / zeta0;   // 1 + eta0

    // chain rule at 0: sigma'(eta0) * eta'(zeta0) * affine' * koebe'(0)
    double sig_p = 1.0 / (one_m * one_p);
    double eta_p = eta0_ / (zeta0 * s20);
    double aff_p = 2.0 / (B_ + 0.25);
    gk_prime0_ = sig_p * eta_p * aff_p;
}

cplx SlitHullMap::core(cplx w_rot) const {
    cplx v = koebe(w_rot);
    cplx zeta = (2.0 * v - (B_ - 0.25)) / (B_ + 0.25);
    // 2v + 1/2 = ((1+W)/(1-W))^2 / 2 in cancellation-free form
    cplx q = (1.0 + w_rot) / (1.0 - w_rot);
    cplx omz2 = 0.5 * q * q * 2.0 * (B_ - v) / ((B_ + 0.25) * (B_ + 0.25));
    cplx eta = two_ray_inv(zeta, omz2);
    return (eta - eta0_) / (1.0 - eta0_ * eta);
}

cplx SlitHullMap::eval(cplx w) const {
    cplx rot = std::polar(1.0, -alpha_);
    return std::polar(1.0, alpha_) * core(rot * w);
}

cplx SlitHullMap::deriv(cplx w) const {
    cplx rot = std::polar(1.0, -alpha_);
    cplx wr = rot * w;
    cplx v = koebe(wr);
    cplx zeta = (2.0 * v - (B_ - 0.25)) / (B_ + 0.25);
    cplx q = (1.0 + wr) / (1.0 - wr);
    cplx omz2 = 0.5 * q * q * 2.0 * (B_ - v) / ((B_ + 0.25) * (B_ + 0.25));
    cplx eta = two_ray_inv(zeta, omz2);
    cplx d_sigma = (1.0 - eta0_ * eta0_) / ((1.0 - eta0_ * eta) * (1.0 - eta0_ * eta));
    cplx d_eta = two_ray_inv_deriv(zeta, omz2);
    double d_aff = 2.0 / (B_ + 0.25);
    return d_sigma * d_eta * d_aff * koebe_deriv(wr);
}

double SlitHullMap::boundary_angle(double phi) const {
    double u = reduce_pi(phi - alpha_);
    if (u == 0.0) throw std::domain_error("SlitHullMap: boundary point at slit base");
    double sh = std::sin(0.5 * u);
    double v = -0.25 / (sh * sh);                          // Koebe boundary value
    double zeta = (2.0 * v - (B_ - 0.25)) / (B_ + 0.25);   // <= -1
    double psi = std::acos(1.0 / zeta);                    // in (pi/2, pi]
    if (u < 0.0) psi = -psi;
    cplx eta = std::polar(1.0, psi);
    cplx sig = (eta - eta0_) / (1.0 - eta0_ * eta);
    return alpha_ + std::arg(sig);
}

double SlitHullMap::boundary_deriv(double phi) const {
    double u = reduce_pi(phi - alpha_);
    if (u == 0.0) throw std::domain_error("SlitHullMap: boundary point at slit base");
    double sh = std::sin(0.5 * u), ch = std::cos(0.5 * u);
    double v = -0.25 / (sh * sh);
    double dv = 0.25 * ch / (sh * sh * sh);  // dv/du, sign handled via |.| at the end
    double zeta = (2.0 * v - (B_ - 0.25)) / (B_ + 0.25);
    double dz = 2.0 / (B_ + 0.25);
    double dpsi = 1.0 / (std::fabs(zeta) * std::sqrt(zeta * zeta - 1.0));
    double psi = std::acos(1.0 / zeta);
    if (u < 0.0) psi = -psi;
    cplx eta = std::polar(1.0, psi);
    double dsig = (1.0 - eta0_ * eta0_) / std::norm(1.0 - eta0_ * eta);
    return std::fabs(dsig * dpsi * dz * dv);
}

double SlitHullMap::cr(const DiscPoint& z) const {
    cplx gz = eval(z.z());
    if (std::norm(gz) >= 1.0) throw std::domain_error("SlitHullMap::cr: point outside domain");
    return (1.0 - std::norm(gz)) / std::abs(deriv(z.z()));
}

double SlitHullMap::poisson(double phi, const DiscPoint& z) const {
    cplx gz = eval(z.z());
    BoundaryAngle img{boundary_angle(phi)};
    DiscPoint gzp{gz.real(), gz.imag()};
    return boundary_deriv(phi) * poisson_kernel_interior(img, gzp);
}

}  // namespace sle
