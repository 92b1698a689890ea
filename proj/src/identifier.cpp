#include "msdc/identifier.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/QR>
#include <fmt/format.h>

#include "msdc/csv.hpp"
#include "msdc/error.hpp"

namespace msdc {

IqrEstimator::IqrEstimator(double lambda, double delta) : lambda_(lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError(fmt::format("lambda must be in (0, 1], got {}", lambda));
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError(fmt::format("delta must be > 0, got {}", delta));
  l_ = delta * Eigen::Matrix3d::Identity();
}

double IqrEstimator::prior_error(const RegressorSample& s) const { return s.y - predict(p_, s.x); }

bool IqrEstimator::update(const RegressorSample& s) {
  if (!s.x.allFinite() || !std::isfinite(s.y)) return false;
  const double inv_sqrt_lambda = 1.0 / std::sqrt(lambda_);
  const double e = prior_error(s);

  // Pre-array [[1, 0], [a, L / sqrt(lambda)]] with a = L x / sqrt(lambda);
  // rotate each a_i into the leading entry b, carrying the gain vector u.
  const Eigen::Vector3d lx = l_.triangularView<Eigen::Lower>() * s.x;
  const Eigen::Vector3d a = inv_sqrt_lambda * lx;
  Eigen::Matrix3d l_next = Eigen::Matrix3d::Zero();
  Eigen::Vector3d u = Eigen::Vector3d::Zero();
  double b = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double b_next = std::hypot(b, a(i));
    if (!(b_next > 0.0) || !std::isfinite(b_next)) return false;
    const double sn = a(i) / b_next;
    const double cs = b / b_next;
    for (int j = 0; j <= i; ++j) {
      const double r = inv_sqrt_lambda * l_(i, j);
      l_next(i, j) = cs * r - sn * u(j);
      u(j) = cs * u(j) + sn * r;
    }
    b = b_next;
  }
  // Gain is u / b, so the correction is (e / b) u.
  const Eigen::Vector3d p_next = p_ + (e / b) * u;
  if (!p_next.allFinite() || !l_next.allFinite()) return false;
  p_ = p_next;
  l_ = l_next;
  ++samples_;
  return true;
}

void IqrEstimator::restore(const Eigen::Vector3d& p, const Eigen::Matrix3d& l, long samples) {
  p_ = p;
  l_ = l.triangularView<Eigen::Lower>();
  samples_ = samples;
}

Eigen::Vector3d batch_ls(const Eigen::MatrixX3d& a, const Eigen::VectorXd& b) {
  if (a.rows() != b.size()) throw DataError("batch_ls: A and B have different numbers of rows");
  const Eigen::ColPivHouseholderQR<Eigen::MatrixX3d> qr(a);
  if (qr.rank() < 3) {
    throw NumericError(fmt::format("batch_ls: rank-deficient regressor matrix (effective rank {})", qr.rank()));
  }
  return qr.solve(b);
}

void BankConfig::validate() const {
  if (d_min < 1 || d_max < d_min) {
    throw ConfigError(fmt::format("delay range must satisfy 1 <= d_min <= d_max, got [{}, {}]", d_min, d_max));
  }
  if (!(eta_learn > 0.0 && eta_learn <= 1.0)) {
    throw ConfigError(fmt::format("eta_learn must be in (0, 1], got {}", eta_learn));
  }
  if (warmup < 0) throw ConfigError("warmup must be >= 0");
  if (!scale.allFinite() || (scale.array() == 0.0).any()) throw ConfigError("regressor scale factors must be finite and nonzero");
  // lambda and delta are checked by IqrEstimator.
  IqrEstimator probe(lambda, delta);
  (void)probe;
}

DelayBank::DelayBank(const BankConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  for (int d = cfg_.d_min; d <= cfg_.d_max; ++d) {
    hyps_.push_back(DelayHypothesis{d, IqrEstimator(cfg_.lambda, cfg_.delta)});
  }
}

std::optional<RegressorSample> DelayBank::sample(const Trajectory& traj, long k, int d) const {
  const long n = static_cast<long>(traj.size());
  if (k < d || k >= n || k < 1) return std::nullopt;
  const auto kd = static_cast<std::size_t>(k - d);
  const auto uk = static_cast<std::size_t>(k);
  RegressorSample s;
  s.k = k;
  s.x = Eigen::Vector3d(traj.dx[kd], traj.v_ego[kd], traj.dv[kd]).cwiseProduct(cfg_.scale);
  s.y = cfg_.target == TargetSignal::Acceleration ? traj.a_ego[uk]
                                                  : (traj.v_ego[uk] - traj.v_ego[uk - 1]) / traj.dt;
  if (!s.x.allFinite() || !std::isfinite(s.y)) return std::nullopt;
  return s;
}

void DelayBank::step(const Trajectory& traj, long k) {
  for (auto& h : hyps_) {
    if (k < h.d) continue;
    const auto s = sample(traj, k, h.d);
    if (!s) {
      h.skipped_last = true;
      continue;
    }
    const double e = h.estimator.prior_error(*s);
    h.j = accumulate_error(h.j, std::abs(e), cfg_.eta_learn);
    h.skipped_last = !h.estimator.update(*s);
    h.last_k = k;
  }
}

std::optional<int> DelayBank::select_delay() const {
  std::optional<int> best;
  double best_j = 0.0;
  for (const auto& h : hyps_) {
    if (h.estimator.samples_seen() < cfg_.warmup || h.last_k < 0) continue;
    if (!best || h.j < best_j) {
      best = h.d;
      best_j = h.j;
    }
  }
  return best;
}

const DelayHypothesis& DelayBank::hypothesis(int d) const {
  if (d < cfg_.d_min || d > cfg_.d_max) throw ConfigError(fmt::format("delay {} outside the bank's range", d));
  return hyps_[static_cast<std::size_t>(d - cfg_.d_min)];
}

Eigen::Vector3d DelayBank::physical_params(int d) const {
  return hypothesis(d).estimator.params().cwiseProduct(cfg_.scale);
}

void DelayBank::write_checkpoint(std::ostream& out) const {
  out << kCheckpointHeader << '\n';
  for (const auto& h : hyps_) {
    const auto& p = h.estimator.params();
    const auto& l = h.estimator.inverse_factor();
    out << h.d << ',' << h.last_k;
    for (double v : {p(0), p(1), p(2), h.j, l(0, 0), l(1, 0), l(1, 1), l(2, 0), l(2, 1), l(2, 2)}) {
      out << ',' << csv::format_number(v);
    }
    out << '\n';
  }
}

void DelayBank::read_checkpoint(std::istream& in, const std::string& source) {
  const auto table = csv::read_numeric(in, source);
  if (table.header != csv::split_row(kCheckpointHeader)) {
    throw DataError(fmt::format("{}: expected header '{}'", source, kCheckpointHeader));
  }
  if (table.rows.size() != hyps_.size()) {
    throw DataError(fmt::format("{}: checkpoint has {} delays, bank has {}", source, table.rows.size(), hyps_.size()));
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    auto& h = hyps_[i];
    if (static_cast<int>(r[0]) != h.d) {
      throw DataError(fmt::format("{}:{}: delay {} does not match bank delay {}", source, table.line_numbers[i], r[0], h.d));
    }
    h.last_k = static_cast<long>(r[1]);
    h.j = r[5];
    Eigen::Matrix3d l = Eigen::Matrix3d::Zero();
    l(0, 0) = r[6];
    l(1, 0) = r[7];
    l(1, 1) = r[8];
    l(2, 0) = r[9];
    l(2, 1) = r[10];
    l(2, 2) = r[11];
    // Sample count is implied by the last processed index (one update per step from k = d).
    const long samples = h.last_k >= h.d ? h.last_k - h.d + 1 : 0;
    h.estimator.restore(Eigen::Vector3d(r[2], r[3], r[4]), l, samples);
  }
}

}  // namespace msdc
