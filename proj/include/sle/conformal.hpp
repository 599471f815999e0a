// conformal.hpp
// exact geometric kernels on the unit disc: conformal radius, Poisson
// kernels, Mobius normalization, and a closed-form radial-slit uniformizer
#ifndef SLE_CONFORMAL_HPP
#define SLE_CONFORMAL_HPP

#include <complex>
#include <stdexcept>

#include "sle/util.hpp"

namespace sle {

struct DiscPoint {
    double re = 0.0;
    double im = 0.0;
    cplx z() const { return {re, im}; }
    double abs2() const { return re * re + im * im; }
};

struct BoundaryAngle {
    double theta = 0.0;
    cplx point() const { return std::polar(1.0, theta); }
};

// radial slit from e^{i anchor} toward 0, of length depth in (0,1)
struct SlitHull {
    BoundaryAngle anchor;
    double depth = 0.0;
};

// CR(U; z) = 1 - |z|^2
double conformal_radius_disc(const DiscPoint& z);

// H(U; e^{i theta}; z) = (1 - |z|^2) / |z - e^{i theta}|^2
double poisson_kernel_interior(const BoundaryAngle& theta, const DiscPoint& z);

// H(U; e^{i theta}, e^{i vartheta}) = 1 / (4 sin^2((vartheta - theta)/2))
double boundary_poisson(const BoundaryAngle& theta, const BoundaryAngle& vartheta);

// phi(w) = (w - z0)/(1 - conj(z0) w), phi(z0) = 0, phi'(z0) = 1/(1-|z0|^2)
class MobiusToOrigin {
  public:
    explicit MobiusToOrigin(const DiscPoint& z0);
    cplx eval(cplx w) const;
    cplx deriv(cplx w) const;

  private:
    cplx z0_;
};

// g_K : U \ K -> U with g_K(0) = 0, g_K'(0) > 0, for a radial slit K.
// Built from the Koebe map and the two-ray-to-disc map; every piece is in
// closed form, so interior values, boundary images and derivatives are exact.
class SlitHullMap {
  public:
    explicit SlitHullMap(const SlitHull& hull);

    double gk_prime0() const { return gk_prime0_; }

    cplx eval(cplx w) const;          // interior w
    cplx deriv(cplx w) const;         // complex derivative at interior w
    double boundary_angle(double phi) const;  // image angle of e^{i phi}
    double boundary_deriv(double phi) const;  // |g_K'(e^{i phi})|

    double cr(const DiscPoint& z) const;                    // CR(U \ K; z)
    double poisson(double phi, const DiscPoint& z) const;   // H(U\K; e^{i phi}; z)

  private:
    double alpha_;   // anchor angle
    double s_;       // inner slit endpoint radius, s = 1 - depth
    double B_;       // Koebe image of s
    double eta0_;    // preimage of 0 before normalization
    double gk_prime0_;

    cplx core(cplx w_rot) const;   // unnormalized map in the rotated frame
};

}  // namespace sle

#endif
