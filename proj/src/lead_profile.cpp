#include "msdc/lead_profile.hpp"

#include <algorithm>
#include <cmath>

#include "msdc/error.hpp"

namespace msdc {

LeadProfile LeadProfile::constant(double speed) {
  if (!std::isfinite(speed)) throw ConfigError("lead speed must be finite");
  return LeadProfile(Constant{speed});
}

LeadProfile LeadProfile::exponential_approach(double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw ConfigError("lead profile coefficients must be finite");
  }
  return LeadProfile(ExponentialApproach{a, b, c});
}

LeadProfile LeadProfile::piecewise_linear(std::vector<double> times, std::vector<double> speeds) {
  if (times.empty() || times.size() != speeds.size()) {
    throw DataError("piecewise-linear lead profile needs equal, nonzero numbers of times and speeds");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw DataError("lead profile times must be strictly increasing");
  }
  for (double v : speeds) {
    if (!std::isfinite(v)) throw DataError("lead profile speeds must be finite");
  }
  return LeadProfile(PiecewiseLinear{std::move(times), std::move(speeds)});
}

double LeadProfile::speed(double t) const {
  struct Visitor {
    double t;
    double operator()(const Constant& c) const { return c.speed; }
    double operator()(const ExponentialApproach& e) const { return e.a - e.b * std::exp(-e.c * t); }
    double operator()(const PiecewiseLinear& p) const {
      if (t <= p.times.front()) return p.speeds.front();
      if (t >= p.times.back()) return p.speeds.back();
      const auto it = std::upper_bound(p.times.begin(), p.times.end(), t);
      const std::size_t hi = static_cast<std::size_t>(it - p.times.begin());
      const std::size_t lo = hi - 1;
      const double w = (t - p.times[lo]) / (p.times[hi] - p.times[lo]);
      return (1.0 - w) * p.speeds[lo] + w * p.speeds[hi];
    }
  };
  return std::visit(Visitor{t}, form_);
}

}  // namespace msdc
