#pragma once

// Spectral element stability analysis for x'(t) = A x(t) + B x(t - tau).
//
// One temporal element of length tau carries a degree-n interpolant of the
// state on Legendre-Gauss-Lobatto nodes. The next segment's nodal values c_m
// follow from the previous segment's c_{m-1} through a dynamic map
// Gamma = L^{-1} R:
//   * the first block row of L / R enforces continuity x_m(0) = x_{m-1}(tau);
//   * the remaining n block rows are the Galerkin projection of the residual
//     x' - A x - B x_delayed onto shifted Legendre polynomials P_0..P_{n-1}.
// The system is asymptotically stable iff the spectral radius of Gamma is < 1.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace msdc {

struct SEMConfig {
  int poly_order = 20;
  int quad_order = 0;  // 0 selects poly_order + 5
  int num_elements = 1;

  int effective_quad_order() const { return quad_order > 0 ? quad_order : poly_order + 5; }
  void validate() const;
};

struct DDESystem {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d B = Eigen::Matrix2d::Zero();
  double tau = 0.0;

  /// A = [[0, -1], [0, 0]], B = [[0, 0], [alpha, -(s alpha + beta)]].
  static DDESystem car_following(double alpha, double beta, double slope_s, double tau);
};

struct QuadratureRule {
  std::vector<double> nodes;  // ascending on [-1, 1]
  std::vector<double> weights;
};

/// Legendre polynomial P_j(x) by the three-term recurrence.
double legendre(int j, double x);

/// Legendre-Gauss-Lobatto nodes (n + 1 of them) and weights 2 / (n (n + 1) P_n(x)^2).
QuadratureRule lgl_nodes(int n);

/// q-point Gauss-Legendre rule, exact for polynomials of degree <= 2q - 1.
QuadratureRule gauss_legendre(int q);

/// w_j = 1 / prod_{m != j} (t_j - t_m). Throws on duplicate nodes.
std::vector<double> barycentric_weights(std::span<const double> nodes);

/// D with (D f)(t_i) = f'(t_i) for every polynomial of degree <= n.
Eigen::MatrixXd lagrange_diff_matrix(std::span<const double> nodes);

/// Values of every Lagrange cardinal function at t (barycentric form).
Eigen::VectorXd lagrange_basis(std::span<const double> nodes, std::span<const double> weights,
                               double t);

/// P_j(2 t / tau - 1).
double shifted_legendre(int j, double t, double tau);

/// Dynamic map over one delay interval, 2(n + 1) square. Throws NumericError
/// when L is numerically singular (reciprocal condition below 1e-12).
Eigen::MatrixXd build_gamma(const DDESystem& sys, const SEMConfig& cfg);

struct StabilityVerdict {
  bool stable = false;
  double rho = 0.0;
};

StabilityVerdict is_stable(double alpha, double beta, double slope_s, double tau,
                           const SEMConfig& cfg = {});

enum class CellStatus { Stable, Unstable, Error };

struct StabilityCell {
  double rho = 0.0;
  CellStatus status = CellStatus::Error;
  std::string error;
};

struct StabilityGrid {
  std::vector<double> alpha_values;
  std::vector<double> beta_values;
  std::vector<double> tau_values;
  double slope_s = 0.0;
  /// Indexed [tau][beta][alpha], see index().
  std::vector<StabilityCell> cells;

  std::size_t index(std::size_t ia, std::size_t ib, std::size_t it) const {
    return (it * beta_values.size() + ib) * alpha_values.size() + ia;
  }
  const StabilityCell& at(std::size_t ia, std::size_t ib, std::size_t it) const {
    return cells[index(ia, ib, it)];
  }
  std::size_t stable_count(std::size_t it) const;
  std::size_t error_count() const;
};

/// n equally spaced values from lo to hi inclusive (n == 1 gives lo).
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Evaluates every (alpha, beta, tau) cell, in parallel over `threads`
/// workers (0 = hardware concurrency). Cell errors are recorded, not thrown.
StabilityGrid stability_sweep(std::span<const double> alpha_values,
                              std::span<const double> beta_values,
                              std::span<const double> tau_values, double slope_s,
                              const SEMConfig& cfg = {}, unsigned threads = 0);

/// `alpha,beta,tau,rho,stable` with stable in {1, 0, error}.
void write_stability_csv(std::ostream& out, const StabilityGrid& grid);

}  // namespace msdc
