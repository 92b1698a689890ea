#include "msdc/sem.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <ostream>
#include <limits>
#include <thread>
#include <tuple>

#include <Eigen/LU>
#include <fmt/format.h>

#include "msdc/csv.hpp"
#include "msdc/eigenvalues.hpp"
#include "msdc/error.hpp"

namespace msdc {
namespace {

constexpr int kNewtonMaxIterations = 100;
constexpr double kMinReciprocalCondition = 1e-12;

// P_n(x) and P_n'(x).
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  // (1 - x^2) P_n' = n (P_{n-1} - x P_n); only used away from the endpoints.
  const double dp = n * (p0 - x * p1) / (1.0 - x * x);
  return {p1, dp};
}

}  // namespace

void SEMConfig::validate() const {
  if (poly_order < 1) throw ConfigError(fmt::format("poly_order must be >= 1, got {}", poly_order));
  if (effective_quad_order() < poly_order + 2) {
    throw ConfigError(fmt::format("quad_order must be >= poly_order + 2, got {}", effective_quad_order()));
  }
  if (num_elements != 1) throw ConfigError("only a single temporal element is supported");
}

DDESystem DDESystem::car_following(double alpha, double beta, double slope_s, double tau) {
  DDESystem sys;
  sys.A << 0.0, -1.0, 0.0, 0.0;
  sys.B << 0.0, 0.0, alpha, -(slope_s * alpha + beta);
  sys.tau = tau;
  return sys;
}

double legendre(int j, double x) {
  if (j == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= j; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return p1;
}

QuadratureRule lgl_nodes(int n) {
  if (n < 1) throw ConfigError(fmt::format("LGL order must be >= 1, got {}", n));
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n + 1));
  rule.weights.resize(static_cast<std::size_t>(n + 1));
  rule.nodes.front() = -1.0;
  rule.nodes.back() = 1.0;

  // Interior nodes are the roots of P_n'. Newton on P_n' from the
  // Chebyshev-Gauss-Lobatto guess, using the Legendre ODE for P_n''.
  for (int i = 1; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * i / n);
    bool converged = false;
    for (int it = 0; it < kNewtonMaxIterations; ++it) {
      const auto [p, dp] = legendre_with_derivative(n, x);
      const double d2p = (2.0 * x * dp - n * (n + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NumericError(fmt::format("LGL Newton iteration did not converge (n = {}, node {})", n, i));
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
  }
  for (int i = 0; i <= n; ++i) {
    const double pn = legendre(n, rule.nodes[static_cast<std::size_t>(i)]);
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / (n * (n + 1.0) * pn * pn);
  }
  return rule;
}

QuadratureRule gauss_legendre(int q) {
  if (q < 1) throw ConfigError(fmt::format("Gauss-Legendre order must be >= 1, got {}", q));
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(q));
  rule.weights.resize(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int it = 0; it < kNewtonMaxIterations; ++it) {
      double p;
      std::tie(p, dp) = legendre_with_derivative(q, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NumericError(fmt::format("Gauss-Legendre Newton iteration did not converge (q = {})", q));
    }
    dp = legendre_with_derivative(q, x).second;
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

std::vector<double> barycentric_weights(std::span<const double> nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> w(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t m = 0; m < n; ++m) {
      if (m == j) continue;
      const double diff = nodes[j] - nodes[m];
      if (diff == 0.0) throw NumericError(fmt::format("duplicate interpolation node {}", nodes[j]));
      w[j] /= diff;
    }
  }
  return w;
}

Eigen::MatrixXd lagrange_diff_matrix(std::span<const double> nodes) {
  const auto w = barycentric_weights(nodes);
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      d(i, j) = (w[uj] / w[ui]) / (nodes[ui] - nodes[uj]);
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

Eigen::VectorXd lagrange_basis(std::span<const double> nodes, std::span<const double> weights,
                               double t) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (t == nodes[static_cast<std::size_t>(j)]) {
      out(j) = 1.0;
      return out;
    }
  }
  double denom = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    out(j) = weights[uj] / (t - nodes[uj]);
    denom += out(j);
  }
  return out / denom;
}

double shifted_legendre(int j, double t, double tau) { return legendre(j, 2.0 * t / tau - 1.0); }

Eigen::MatrixXd build_gamma(const DDESystem& sys, const SEMConfig& cfg) {
  cfg.validate();
  if (!(sys.tau > 0.0)) throw ConfigError(fmt::format("delay tau must be > 0, got {}", sys.tau));

  const int n = cfg.poly_order;
  const Eigen::Index nodes_count = n + 1;
  const Eigen::Index dim = 2 * nodes_count;
  const double tau = sys.tau;

  // Interpolation nodes on [0, tau].
  const auto lgl = lgl_nodes(n);
  std::vector<double> t_nodes(lgl.nodes.size());
  for (std::size_t i = 0; i < t_nodes.size(); ++i) t_nodes[i] = 0.5 * tau * (lgl.nodes[i] + 1.0);
  const auto bw = barycentric_weights(t_nodes);
  const Eigen::MatrixXd diff = lagrange_diff_matrix(t_nodes);

  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(dim, dim);

  // Continuity: first node of this segment equals last node of the previous one.
  lhs.block(0, 0, 2, 2).setIdentity();
  rhs.block(0, dim - 2, 2, 2).setIdentity();

  // Galerkin rows: integral of psi_i (Phi' - A Phi) and psi_i B Phi over [0, tau].
  const auto quad = gauss_legendre(cfg.effective_quad_order());
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double t = 0.5 * tau * (quad.nodes[q] + 1.0);
    const double wq = 0.5 * tau * quad.weights[q];
    const Eigen::VectorXd phi = lagrange_basis(t_nodes, bw, t);
    // L_j'(t) = sum_i L_i(t) D_ij since L_j' has degree n - 1.
    const Eigen::VectorXd dphi = diff.transpose() * phi;
    for (int i = 0; i < n; ++i) {
      const double psi = wq * shifted_legendre(i, t, tau);
      const Eigen::Index row = 2 * (i + 1);
      for (Eigen::Index j = 0; j < nodes_count; ++j) {
        const Eigen::Index col = 2 * j;
        lhs.block(row, col, 2, 2) += psi * (dphi(j) * Eigen::Matrix2d::Identity() - phi(j) * sys.A);
        rhs.block(row, col, 2, 2) += psi * phi(j) * sys.B;
      }
    }
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  const double rcond = lu.rcond();
  if (!(rcond > kMinReciprocalCondition)) {
    throw NumericError(fmt::format(
        "singular projection matrix (rcond = {:.3g}) at B = [[{}, {}], [{}, {}]], tau = {}", rcond,
        sys.B(0, 0), sys.B(0, 1), sys.B(1, 0), sys.B(1, 1), tau));
  }
  return lu.solve(rhs);
}

StabilityVerdict is_stable(double alpha, double beta, double slope_s, double tau, const SEMConfig& cfg) {
  const Eigen::MatrixXd gamma = build_gamma(DDESystem::car_following(alpha, beta, slope_s, tau), cfg);
  const double rho = spectral_radius(gamma);
  return StabilityVerdict{rho < 1.0, rho};
}

std::size_t StabilityGrid::stable_count(std::size_t it) const {
  std::size_t count = 0;
  for (std::size_t ib = 0; ib < beta_values.size(); ++ib) {
    for (std::size_t ia = 0; ia < alpha_values.size(); ++ia) {
      if (at(ia, ib, it).status == CellStatus::Stable) ++count;
    }
  }
  return count;
}

std::size_t StabilityGrid::error_count() const {
  std::size_t count = 0;
  for (const auto& c : cells) count += c.status == CellStatus::Error ? 1 : 0;
  return count;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

StabilityGrid stability_sweep(std::span<const double> alpha_values,
                              std::span<const double> beta_values,
                              std::span<const double> tau_values, double slope_s,
                              const SEMConfig& cfg, unsigned threads) {
  cfg.validate();
  auto check_axis = [](std::span<const double> v, const char* name) {
    if (v.empty()) throw ConfigError(fmt::format("stability sweep: {} values are empty", name));
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] > v[i - 1])) throw ConfigError(fmt::format("stability sweep: {} values must ascend", name));
    }
  };
  check_axis(alpha_values, "alpha");
  check_axis(beta_values, "beta");
  check_axis(tau_values, "tau");

  StabilityGrid grid;
  grid.alpha_values.assign(alpha_values.begin(), alpha_values.end());
  grid.beta_values.assign(beta_values.begin(), beta_values.end());
  grid.tau_values.assign(tau_values.begin(), tau_values.end());
  grid.slope_s = slope_s;
  grid.cells.resize(alpha_values.size() * beta_values.size() * tau_values.size());

  const std::size_t total = grid.cells.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
      const std::size_t na = grid.alpha_values.size();
      const std::size_t nb = grid.beta_values.size();
      const std::size_t ia = idx % na;
      const std::size_t ib = (idx / na) % nb;
      const std::size_t it = idx / (na * nb);
      StabilityCell& cell = grid.cells[idx];
      try {
        const auto v = is_stable(grid.alpha_values[ia], grid.beta_values[ib], slope_s, grid.tau_values[it], cfg);
        cell.rho = v.rho;
        cell.status = v.stable ? CellStatus::Stable : CellStatus::Unstable;
      } catch (const Error& e) {
        cell.rho = std::numeric_limits<double>::quiet_NaN();
        cell.status = CellStatus::Error;
        cell.error = e.what();
      }
    }
  };

  unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, total));
  std::vector<std::jthread> pool;
  for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  return grid;
}

void write_stability_csv(std::ostream& out, const StabilityGrid& grid) {
  out << "alpha,beta,tau,rho,stable\n";
  for (std::size_t it = 0; it < grid.tau_values.size(); ++it) {
    for (std::size_t ib = 0; ib < grid.beta_values.size(); ++ib) {
      for (std::size_t ia = 0; ia < grid.alpha_values.size(); ++ia) {
        const auto& c = grid.at(ia, ib, it);
        out << csv::format_number(grid.alpha_values[ia]) << ',' << csv::format_number(grid.beta_values[ib])
            << ',' << csv::format_number(grid.tau_values[it]) << ',' << csv::format_number(c.rho) << ','
            << (c.status == CellStatus::Stable ? "1" : c.status == CellStatus::Unstable ? "0" : "error")
            << '\n';
      }
    }
  }
}

}  // namespace msdc
