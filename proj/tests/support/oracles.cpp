#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace msdc::oracle {
namespace {

// Modulus condition at lambda = i omega after eliminating tau.
double modulus_gap(double omega, double alpha, double b) {
  const double w2 = omega * omega;
  return w2 * w2 - b * b * w2 - alpha * alpha;
}

struct Crossing {
  double omega;
  double phase;  // in (0, 2 pi]
};

// All crossing frequencies with their phase omega * tau mod 2 pi.
// Returns false on a bracketing failure.
bool crossings(double alpha, double b, std::vector<Crossing>& out) {
  const double omega_max = 2.0 + 2.0 * (std::abs(b) + std::sqrt(std::abs(alpha)));
  constexpr int kScan = 20000;
  double prev_w = omega_max * 1e-9;
  double prev_g = modulus_gap(prev_w, alpha, b);
  for (int i = 1; i <= kScan; ++i) {
    const double w = omega_max * i / kScan;
    const double g = modulus_gap(w, alpha, b);
    if ((prev_g < 0.0) != (g < 0.0)) {
      double lo = prev_w, hi = w, glo = prev_g;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = modulus_gap(mid, alpha, b);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double omega = 0.5 * (lo + hi);
      if (!(std::abs(hi - lo) <= 1e-9 * omega)) return false;
      // Solve the real / imaginary equations for (cos, sin) of omega tau.
      const double den = alpha * alpha + b * b * omega * omega;
      const double c = alpha * omega * omega / den;
      const double s = b * omega * omega * omega / den;
      double phase = std::atan2(s, c);
      if (phase <= 0.0) phase += 2.0 * std::numbers::pi;
      out.push_back({omega, phase});
    }
    prev_w = w;
    prev_g = g;
  }
  return true;
}

int delay_free_unstable_roots(double alpha, double b) {
  if (alpha < 0.0) return 1;
  if (alpha == 0.0) return -1;  // root at the origin
  return b > 0.0 ? 0 : 2;
}

}  // namespace

double first_crossing_delay(double alpha, double beta, double slope_s) {
  const double b = slope_s * alpha + beta;
  std::vector<Crossing> cs;
  if (!crossings(alpha, b, cs)) return std::numeric_limits<double>::quiet_NaN();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cs) best = std::min(best, c.phase / c.omega);
  return best;
}

Verdict char_boundary_oracle(double alpha, double beta, double slope_s, double tau) {
  const double b = slope_s * alpha + beta;
  const int base = delay_free_unstable_roots(alpha, b);
  if (base < 0) return Verdict::Indeterminate;
  std::vector<Crossing> cs;
  if (!crossings(alpha, b, cs)) return Verdict::Indeterminate;

  int unstable = base;
  for (const auto& c : cs) {
    // Direction of crossing: sign of d(modulus gap)/d omega at the root.
    const double h = 1e-7 * c.omega;
    const double slope = modulus_gap(c.omega + h, alpha, b) - modulus_gap(c.omega - h, alpha, b);
    const int direction = slope > 0.0 ? 1 : -1;
    for (int k = 0;; ++k) {
      const double tk = (c.phase + 2.0 * std::numbers::pi * k) / c.omega;
      if (tk >= tau) break;
      // Real and imaginary parts must vanish together at (omega, tk).
      const double w = c.omega;
      const double re = -w * w + b * w * std::sin(w * tk) + alpha * std::cos(w * tk);
      const double im = b * w * std::cos(w * tk) - alpha * std::sin(w * tk);
      if (std::hypot(re, im) > 1e-6 * (w * w + std::abs(b) * w + std::abs(alpha))) return Verdict::Indeterminate;
      unstable += 2 * direction;
    }
  }
  return unstable == 0 ? Verdict::Stable : Verdict::Unstable;
}

CovarianceRls::CovarianceRls(double lambda, double delta) : lambda_(lambda) {
  cov_ = delta * delta * Eigen::Matrix3d::Identity();
}

void CovarianceRls::update(const Eigen::Vector3d& x, double y) {
  const Eigen::Vector3d px = cov_ * x;
  const Eigen::Vector3d gain = px / (lambda_ + x.dot(px));
  p_ += gain * (y - x.dot(p_));
  cov_ = (cov_ - gain * px.transpose()) / lambda_;
}

Eigen::MatrixXd companion_from_roots(const std::vector<std::complex<double>>& roots) {
  const auto n = static_cast<Eigen::Index>(roots.size());
  std::vector<std::complex<double>> coeffs{1.0};  // highest degree first
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      next[i] += coeffs[i];
      next[i + 1] -= r * coeffs[i];
    }
    coeffs = std::move(next);
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) c(0, j) = -coeffs[static_cast<std::size_t>(j + 1)].real();
  for (Eigen::Index i = 1; i < n; ++i) c(i, i - 1) = 1.0;
  return c;
}

std::vector<std::complex<double>> sorted(std::vector<std::complex<double>> v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.real() - b.real()) > 1e-7) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return v;
}

double monomial_integral(int k) { return k % 2 == 1 ? 0.0 : 2.0 / (k + 1.0); }

}  // namespace msdc::oracle
