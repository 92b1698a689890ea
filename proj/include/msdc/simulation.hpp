#pragma once

#include "msdc/lead_profile.hpp"
#include "msdc/model.hpp"
#include "msdc/trajectory.hpp"

namespace msdc {

/// State on the initial delay interval [-tau, 0]. Both supported forms are
/// constant in time.
class History {
 public:
  static History constant(const CFState& state) { return History(state); }

  /// Equilibrium for lead speed u scaled component-wise by (1 + eps).
  static History perturbed_steady_state(double u, const ReducedParams& r, double eps);

  CFState at(double /*t*/) const { return state_; }

 private:
  explicit History(const CFState& s) : state_(s) {}
  CFState state_;
};

/// Components with magnitude above this end a run as diverged.
inline constexpr double kDivergenceLimit = 1e9;

/// Fixed-step RK4 method of steps for the delayed equations of motion.
///
/// With tau > 0 the internal step is tau / m, m = max(1, round(tau / h)), so
/// delayed lookups at stage ends land on stored grid states; the half-step
/// stage uses cubic Hermite interpolation between neighbouring grid states.
/// Only the last m + 1 grid states are kept. Output rows are at multiples of
/// the requested h, interpolated from the internal grid when it differs.
/// A diverging run is truncated and returns status Diverged with the time of
/// the first offending step.
Trajectory simulate_dde(const CFParams& p, const LeadProfile& lead, const History& hist,
                        double horizon, double h, Mode mode);

/// Reduced-parameter overload (always linear relaxation law).
Trajectory simulate_dde(const ReducedParams& r, double tau, const LeadProfile& lead,
                        const History& hist, double horizon, double h);

/// Explicit-Euler discretization with delay d = round(tau / dt):
///   v(k)  = v(k-1) + dt a(dx(k-d), v(k-d), dv(k-d))
///   dx(k) = dx(k-1) + dt dv(k-1)
/// Indices below zero read the initial state. a_ego(k) = (v(k) - v(k-1)) / dt,
/// and a_ego(0) is the acceleration that drives the first step.
Trajectory simulate_euler(const CFParams& p, const LeadProfile& lead, const CFState& x0,
                          double horizon, double dt, Mode mode);

}  // namespace msdc
