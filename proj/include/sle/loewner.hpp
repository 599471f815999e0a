// loewner.hpp
// radial Loewner engine: single- and multi-slit forward flows of covering
// maps with derivative jets, the m_t accumulator, capacity bookkeeping,
// tip-jet estimation on composed charts, curve tracing by backward flow,
// and the common-time / multi-time change of variables
#ifndef SLE_LOEWNER_HPP
#define SLE_LOEWNER_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sle/util.hpp"

namespace sle {

struct SwallowedPointError : std::runtime_error {
    double time;
    explicit SwallowedPointError(double t)
        : std::runtime_error("material point swallowed at t=" + std::to_string(t)), time(t) {}
};

struct CollisionError : std::runtime_error {
    int i, j;
    CollisionError(int a, int b, double gap)
        : std::runtime_error("driving collision between curves " + std::to_string(a) + " and " +
                             std::to_string(b) + " (gap " + std::to_string(gap) + ")"),
          i(a), j(b) {}
};

struct StencilError : std::runtime_error {
    explicit StencilError(const std::string& w) : std::runtime_error(w) {}
};

// image of one boundary angle under a covering map plus its first three
// theta-derivatives; covering maps are increasing so h1 > 0
struct DerivativeJet {
    double h = 0.0;
    double h1 = 1.0;
    double h2 = 0.0;
    double h3 = 0.0;

    double schwarzian() const { return h3 / h1 - 1.5 * (h2 / h1) * (h2 / h1); }
};

// dm/dt_j term: N = -(1/3) S h + (1/6)(1 - h1^2)
double m_rate(const DerivativeJet& tip);

// d/dt_i N^j = a_i a_j / (4 sin^4((w_j - w_i)/2))
double m_mixed_partial(double a_i, double a_j, double omega_j, double omega_i);

// advance a jet under d h = rate * cot((h - xi)/2) dt with frozen driving,
// RK4 with nsub substeps; throws SwallowedPointError when |sin((h-xi)/2)|
// drops below guard
DerivativeJet flow_covering_step(const DerivativeJet& jet, double xi, double rate, double dt,
                                 int nsub = 4, double guard = 1e-9, double t_now = 0.0);

// exact frozen-driving solution of du/dt = cot(u/2) on the boundary
double frozen_covering_exact(double u0, double t);

// one exact reverse-flow step (frozen driving) for the backward trace
cplx reverse_step_exact(cplx z, double xi, double dt);

// sorted material-point grid carried through a covering flow
struct CoveringGrid {
    std::vector<double> phi;        // material angles, strictly increasing
    std::vector<DerivativeJet> jet; // current images
    std::vector<char> alive;

    void seed_cluster(double center, double delta_min, double ratio, double span);
    void add_point(double angle);
    void sort_points();
};

// single-slit covering flow of one curve in its own chart; keeps the whole
// driving history so new material points can be replayed in
class SingleSlitFlow {
  public:
    double t = 0.0;  // own capacity
    CoveringGrid grid;
    std::vector<double> xi_hist;  // driving value per executed step
    std::vector<double> dt_hist;

    // records the initial driving value so the first step can detect
    // material points crossed by the first driving jump
    void begin(double xi0);
    void step(double xi, double dt, double guard = 1e-9);
    // replay an angle through the recorded history; returns its current jet
    DerivativeJet replay(double angle, bool* swallowed) const;
    // insert a replayed material point (no-op if it would be swallowed)
    bool insert_point(double angle);
};

// multi-slit joint covering flow, rates fold into capacity increments
class JointFlow {
  public:
    CoveringGrid grid;
    std::vector<std::vector<double>> omega_hist;  // per step: p driving values
    std::vector<std::vector<double>> dcap_hist;   // per step: p capacity increments

    void begin(const std::vector<double>& omega0);
    void step(const std::vector<double>& omega, const std::vector<double>& dcap,
              double guard = 1e-9);
    DerivativeJet replay(double angle, bool* swallowed) const;
    bool insert_point(double angle);
};

// evolving multi-slit chart bookkeeping (field names match the snapshots)
struct MultiSlitState {
    double common_time = 0.0;
    std::vector<double> per_curve_capacity;  // capacity contributed per curve
    std::vector<double> driving;             // lifted omega^j
    double log_cap = 0.0;                    // log g'_t(0) = sum per_curve_capacity
    double m_acc = 0.0;
    std::vector<double> rates;               // a^j multiplying dt
    JointFlow joint;

    double collision_guard = 1e-4;

    explicit MultiSlitState(const std::vector<double>& theta0);
    int p() const { return static_cast<int>(driving.size()); }

    // advance by superposed vector fields: capacity increment rates[j]*dt on
    // curve j, driving moved by the supplied increments afterwards
    void step(const std::vector<double>& domega, double dt);
    // staircase variant: grow only curve j by capacity dcap at fixed driving
    void step_single(int j, double dcap);

    std::string snapshot_json() const;
};

// local polynomial fit of the composed chart h_t o (h^j)^{-1} around the tip
// from (own image, joint image) pairs; fd_step sets the preferred window
DerivativeJet tip_jet_estimate(const SingleSlitFlow& own, const JointFlow& joint, double xi_tip,
                               double fd_step = 1e-3);

// cumulative own-capacity clocks t_j(t) from h1_tip histories on a uniform
// common-time grid (trapezoid of 1/h1^2); satisfies t <= t_j(t) <= p t
std::vector<std::vector<double>> common_to_multi_time(
    const std::vector<std::vector<double>>& h1_tip, double dt);

struct CurveTrace {
    // per curve: (time, point) samples
    std::vector<std::vector<std::pair<double, cplx>>> points;
};

// backward-flow trace of a stored driving record (uniform grid); xi_cols is
// one driving path per curve, rates per curve are capacity rates per step
CurveTrace trace_paths(const std::vector<std::vector<double>>& xi_cols, double dt,
                       std::size_t stride, const std::vector<double>& rates);

}  // namespace sle

#endif
