#pragma once

#include <variant>
#include <vector>

namespace msdc {

/// Lead-vehicle speed u(t).
class LeadProfile {
 public:
  struct Constant {
    double speed = 0.0;
  };
  /// a - b exp(-c t)
  struct ExponentialApproach {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
  };
  /// Linear interpolation between samples, held constant outside them.
  struct PiecewiseLinear {
    std::vector<double> times;
    std::vector<double> speeds;
  };

  LeadProfile() : form_(Constant{}) {}

  static LeadProfile constant(double speed);
  static LeadProfile exponential_approach(double a, double b, double c);
  static LeadProfile piecewise_linear(std::vector<double> times, std::vector<double> speeds);

  /// Lead profile of the vehicle-following scenario: 15 - 5 exp(-0.05 t).
  static LeadProfile scenario_default() { return exponential_approach(15.0, 5.0, 0.05); }

  double speed(double t) const;

  const auto& form() const { return form_; }

 private:
  explicit LeadProfile(std::variant<Constant, ExponentialApproach, PiecewiseLinear> f)
      : form_(std::move(f)) {}

  std::variant<Constant, ExponentialApproach, PiecewiseLinear> form_;
};

}  // namespace msdc
