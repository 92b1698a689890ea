#pragma once

// Online identification of (alpha_id, beta_id, gamma_id) in
//   a(k) = alpha_id dx(k - d) + beta_id v(k - d) + gamma_id dv(k - d)
// with one inverse-QR recursive least squares estimator per candidate delay d.
// Each estimator accumulates an exponentially weighted absolute prior
// prediction error J(d, k); the candidate with smallest J is selected.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "msdc/trajectory.hpp"

namespace msdc {

struct RegressorSample {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();  // (dx, v, dv) at k - d, after scaling
  double y = 0.0;                               // acceleration at k
  long k = 0;
};

/// RLS propagating the lower-triangular inverse Cholesky factor
/// L = R^{-T} (covariance P = L^T L) by Givens rotations.
class IqrEstimator {
 public:
  /// L starts at delta I (prior covariance delta^2 I), parameters at zero.
  IqrEstimator(double lambda, double delta);

  /// y - x^T p with the current parameters.
  double prior_error(const RegressorSample& s) const;

  /// One RLS step. Returns false (and leaves the state untouched) when the
  /// sample is non-finite or a rotation degenerates.
  bool update(const RegressorSample& s);

  const Eigen::Vector3d& params() const { return p_; }
  const Eigen::Matrix3d& inverse_factor() const { return l_; }
  /// L^T L.
  Eigen::Matrix3d covariance() const { return l_.transpose() * l_; }
  double lambda() const { return lambda_; }
  long samples_seen() const { return samples_; }

  /// Restores a checkpointed state.
  void restore(const Eigen::Vector3d& p, const Eigen::Matrix3d& l, long samples);

 private:
  double lambda_;
  Eigen::Vector3d p_ = Eigen::Vector3d::Zero();
  Eigen::Matrix3d l_;
  long samples_ = 0;
};

inline double predict(const Eigen::Vector3d& p, const Eigen::Vector3d& x) { return x.dot(p); }

/// (1 - eta) J + eta |e|.
inline double accumulate_error(double j_prev, double e_abs, double eta_learn) {
  return (1.0 - eta_learn) * j_prev + eta_learn * e_abs;
}

/// Least-squares minimizer of |A p - B|^2 by column-pivoted Householder QR.
/// Throws NumericError naming the effective rank when A is rank deficient.
Eigen::Vector3d batch_ls(const Eigen::MatrixX3d& a, const Eigen::VectorXd& b);

enum class TargetSignal {
  Acceleration,     // the a_ego column
  SpeedDifference,  // (v(k) - v(k-1)) / dt
};

struct BankConfig {
  int d_min = 2;
  int d_max = 10;
  double lambda = 0.95;
  double delta = 10.0;
  double eta_learn = 0.05;
  /// Samples an estimator must have absorbed before it may be selected.
  long warmup = 20;
  /// Multipliers applied to (dx, v, dv) before regression; identified
  /// parameters are mapped back by the same factors.
  Eigen::Vector3d scale = Eigen::Vector3d::Ones();
  TargetSignal target = TargetSignal::Acceleration;

  void validate() const;
};

struct DelayHypothesis {
  int d = 0;
  IqrEstimator estimator;
  double j = 0.0;
  long last_k = -1;
  bool skipped_last = false;  // missing / non-finite data on the last step
};

class DelayBank {
 public:
  explicit DelayBank(const BankConfig& cfg);

  /// Processes time index k of `traj`: for each d with k >= d, forms the
  /// delayed regressor, accumulates the prior error into J, then updates the
  /// estimator. Requires k >= 1 (the target needs v(k - 1) when differencing).
  void step(const Trajectory& traj, long k);

  /// Argmin of J over warmed-up estimators, ties to the smallest d.
  std::optional<int> select_delay() const;

  const DelayHypothesis& hypothesis(int d) const;
  const std::vector<DelayHypothesis>& hypotheses() const { return hyps_; }
  const BankConfig& config() const { return cfg_; }

  /// Parameters of candidate d in physical units (scale removed).
  Eigen::Vector3d physical_params(int d) const;

  /// Regressor and target at index k for delay d, or nullopt when out of range
  /// or non-finite.
  std::optional<RegressorSample> sample(const Trajectory& traj, long k, int d) const;

  /// One row per delay: `d,k,p1,p2,p3,J,r11,r21,r22,r31,r32,r33`
  /// (p in regression units, k = last processed index or -1).
  void write_checkpoint(std::ostream& out) const;
  /// Restores estimator states from a checkpoint written with the same config.
  /// The warm-up sample count is taken as k - d + 1.
  void read_checkpoint(std::istream& in, const std::string& source = "<checkpoint>");

 private:
  BankConfig cfg_;
  std::vector<DelayHypothesis> hyps_;
};

inline constexpr const char* kCheckpointHeader = "d,k,p1,p2,p3,J,r11,r21,r22,r31,r32,r33";

}  // namespace msdc
