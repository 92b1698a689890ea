#pragma once

// Mass-spring-damper-clutch car-following model.
//
// The ego vehicle (mass M) is tied to its leader by a spring of stiffness k
// whose natural length X0(v) grows with ego speed, a damper c acting on the
// relative speed, and a clutch that delays the response by tau:
//
//   d(dx)/dt = u(t) - v(t)
//   M dv/dt  = k [dx(t - tau) - X0(v(t - tau))] + c dv_rel(t - tau)
//
// State convention: x1 = relative distance, x2 = ego speed. The relative
// speed is always derived as u - x2.

#include <string>

#include "msdc/config.hpp"

namespace msdc {

/// Physical parameters, SI units.
struct CFParams {
  double mass_kg = 1000.0;
  double stiffness = 100.0;
  double damping = 500.0;
  double slope_s = 5.0;
  double delay_tau = 0.5;
  double v_low = 2.0;
  double v_high = 30.0;
  double x0_min = 10.0;
  double x0_max = 150.0;

  /// Throws ConfigError on a violated invariant, including breakpoint
  /// continuity (x0_min = s v_low, x0_max = s v_high).
  void validate() const;

  /// Vehicle-following scenario parameters: M = 1000 kg, k = 100 N/m,
  /// c = 500 N s/m, s = 5 s, tau = 0.5 s. Speed breakpoints 2 and 30 m/s.
  static CFParams table1();
};

/// Stiffness and damping per unit mass, plus the relaxation slope.
struct ReducedParams {
  double alpha = 0.0;  // k / M, 1/s^2
  double beta = 0.0;   // c / M, 1/s
  double slope_s = 0.0;

  void validate() const;
};

/// Coefficients of the linear regression form used for identification:
/// a = alpha_id dx + beta_id v + gamma_id dv.
struct IdentTriple {
  double alpha_id = 0.0;  // k / M
  double beta_id = 0.0;   // -k s / M
  double gamma_id = 0.0;  // c / M
  int delay_steps = 0;
};

struct CFState {
  double x1 = 0.0;  // relative distance, m
  double x2 = 0.0;  // ego speed, m/s

  friend bool operator==(const CFState&, const CFState&) = default;
};

enum class Mode {
  Linear,     // X0(v) = s v everywhere
  Nonlinear,  // piecewise relaxation length with saturation
};

Mode parse_mode(const std::string& text);
std::string to_string(Mode mode);

double relaxation_length(double v, const CFParams& p);

/// Ego acceleration from delayed relative distance, ego speed and relative speed.
double acceleration(double dx_delayed, double v_delayed, double dv_delayed, const CFParams& p,
                    Mode mode);

/// Equilibrium for a constant lead speed u: (s u, u).
///
/// Setting both derivatives of the reduced system to zero gives x2 = u and
/// alpha x1 - (s alpha + beta) u + beta u = 0, i.e. x1 = s u. The closed form
/// (u / alpha)(-1 + alpha s + beta) quoted alongside the model does not null
/// the right-hand side; see the residual tests.
CFState steady_state(double u, const ReducedParams& r);

struct Residual {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Right-hand side of the reduced DDE with x(t) = x(t - tau) = x and constant
/// lead speed u. Zero exactly at an equilibrium.
Residual steady_state_residual(const CFState& x, double u, const ReducedParams& r);

ReducedParams reduce(const CFParams& p);
IdentTriple ident_triple(const CFParams& p, int delay_steps);

/// Mass-normalized ratios recovered from an identified triple:
/// k/M = alpha_id, c/M = gamma_id, s = -beta_id / alpha_id.
struct PhysicalRatios {
  double k_over_m = 0.0;
  double c_over_m = 0.0;
  double slope_s = 0.0;
};
PhysicalRatios ratios_from_triple(const IdentTriple& t);

/// Unit-mass parameters whose linear segment covers every speed, for
/// simulating the reduced system directly.
CFParams from_reduced(const ReducedParams& r, double tau);

/// `[model]` section with keys mass_kg, stiffness, damping, slope_s,
/// delay_tau, v_low, v_high, x0_min, x0_max. All keys required.
CFParams cf_params_from_config(const ConfigSection& section);
std::string cf_params_to_config(const CFParams& p);

}  // namespace msdc
