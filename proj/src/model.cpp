#include "msdc/model.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "msdc/error.hpp"

namespace msdc {
namespace {

bool close_rel(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Upper breakpoint for unit-mass parameters built from reduced ones.
constexpr double kUnboundedSpeed = 1e12;

}  // namespace

void CFParams::validate() const {
  auto check = [](bool ok, const char* msg) {
    if (!ok) throw ConfigError(fmt::format("invalid model parameters: {}", msg));
  };
  check(std::isfinite(mass_kg) && mass_kg > 0.0, "mass_kg must be > 0");
  check(std::isfinite(stiffness) && stiffness >= 0.0, "stiffness must be >= 0");
  check(std::isfinite(damping) && damping >= 0.0, "damping must be >= 0");
  check(std::isfinite(delay_tau) && delay_tau >= 0.0, "delay_tau must be >= 0");
  check(std::isfinite(slope_s), "slope_s must be finite");
  check(v_low <= v_high, "v_low must be <= v_high");
  if (!close_rel(x0_min, slope_s * v_low)) {
    throw ConfigError(fmt::format("invalid model parameters: x0_min = {} but slope_s * v_low = {}",
                                  x0_min, slope_s * v_low));
  }
  if (!close_rel(x0_max, slope_s * v_high)) {
    throw ConfigError(fmt::format("invalid model parameters: x0_max = {} but slope_s * v_high = {}",
                                  x0_max, slope_s * v_high));
  }
}

CFParams CFParams::table1() {
  CFParams p;
  p.mass_kg = 1000.0;
  p.stiffness = 100.0;
  p.damping = 500.0;
  p.slope_s = 5.0;
  p.delay_tau = 0.5;
  p.v_low = 2.0;
  p.v_high = 30.0;
  p.x0_min = 10.0;
  p.x0_max = 150.0;
  return p;
}

void ReducedParams::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ConfigError(fmt::format("invalid reduced parameters: alpha = {}, beta = {}", alpha, beta));
  }
}

Mode parse_mode(const std::string& text) {
  if (text == "linear") return Mode::Linear;
  if (text == "nonlinear") return Mode::Nonlinear;
  throw ConfigError(fmt::format("unknown mode '{}' (expected linear or nonlinear)", text));
}

std::string to_string(Mode mode) { return mode == Mode::Linear ? "linear" : "nonlinear"; }

double relaxation_length(double v, const CFParams& p) {
  if (v < p.v_low) return p.x0_min;
  if (v <= p.v_high) return p.slope_s * v;
  return p.x0_max;
}

double acceleration(double dx_delayed, double v_delayed, double dv_delayed, const CFParams& p,
                    Mode mode) {
  const double x0 = mode == Mode::Linear ? p.slope_s * v_delayed : relaxation_length(v_delayed, p);
  return (p.stiffness / p.mass_kg) * (dx_delayed - x0) + (p.damping / p.mass_kg) * dv_delayed;
}

CFState steady_state(double u, const ReducedParams& r) {
  if (r.alpha == 0.0) {
    throw NumericError("steady state undefined for a zero-stiffness spring (alpha = 0)");
  }
  return CFState{r.slope_s * u, u};
}

Residual steady_state_residual(const CFState& x, double u, const ReducedParams& r) {
  // A x + B x + f with A = [[0, -1], [0, 0]], B = [[0, 0], [alpha, -(s alpha + beta)]],
  // f = (u, beta u).
  return Residual{u - x.x2,
                  r.alpha * x.x1 - (r.slope_s * r.alpha + r.beta) * x.x2 + r.beta * u};
}

ReducedParams reduce(const CFParams& p) {
  return ReducedParams{p.stiffness / p.mass_kg, p.damping / p.mass_kg, p.slope_s};
}

IdentTriple ident_triple(const CFParams& p, int delay_steps) {
  const double a = p.stiffness / p.mass_kg;
  return IdentTriple{a, -a * p.slope_s, p.damping / p.mass_kg, delay_steps};
}

PhysicalRatios ratios_from_triple(const IdentTriple& t) {
  if (t.alpha_id == 0.0) throw NumericError("cannot recover slope from a triple with alpha_id = 0");
  return PhysicalRatios{t.alpha_id, t.gamma_id, -t.beta_id / t.alpha_id};
}

CFParams from_reduced(const ReducedParams& r, double tau) {
  CFParams p;
  p.mass_kg = 1.0;
  p.stiffness = r.alpha;
  p.damping = r.beta;
  p.slope_s = r.slope_s;
  p.delay_tau = tau;
  p.v_low = -kUnboundedSpeed;
  p.v_high = kUnboundedSpeed;
  p.x0_min = r.slope_s * p.v_low;
  p.x0_max = r.slope_s * p.v_high;
  return p;
}

CFParams cf_params_from_config(const ConfigSection& section) {
  section.reject_unknown({"mass_kg", "stiffness", "damping", "slope_s", "delay_tau", "v_low",
                          "v_high", "x0_min", "x0_max"});
  CFParams p;
  p.mass_kg = section.get_double("mass_kg");
  p.stiffness = section.get_double("stiffness");
  p.damping = section.get_double("damping");
  p.slope_s = section.get_double("slope_s");
  p.delay_tau = section.get_double("delay_tau");
  p.v_low = section.get_double("v_low");
  p.v_high = section.get_double("v_high");
  p.x0_min = section.get_double("x0_min");
  p.x0_max = section.get_double("x0_max");
  p.validate();
  return p;
}

std::string cf_params_to_config(const CFParams& p) {
  return fmt::format(
      "[model]\nmass_kg = {:.17g}\nstiffness = {:.17g}\ndamping = {:.17g}\nslope_s = {:.17g}\n"
      "delay_tau = {:.17g}\nv_low = {:.17g}\nv_high = {:.17g}\nx0_min = {:.17g}\nx0_max = {:.17g}\n",
      p.mass_kg, p.stiffness, p.damping, p.slope_s, p.delay_tau, p.v_low, p.v_high, p.x0_min,
      p.x0_max);
}

}  // namespace msdc
