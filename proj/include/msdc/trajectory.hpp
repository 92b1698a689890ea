#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace msdc {

enum class RunStatus { Ok, Diverged };

/// Uniformly sampled following trajectory. Row k is at time t0 + k dt.
struct Trajectory {
  double dt = 0.1;
  double t0 = 0.0;
  std::vector<double> dx;
  std::vector<double> v_ego;
  std::vector<double> dv;
  std::vector<double> a_ego;
  std::vector<double> u_lead;

  RunStatus status = RunStatus::Ok;
  double diverged_at = 0.0;  // meaningful only when status == Diverged

  std::size_t size() const { return dx.size(); }
  bool empty() const { return dx.empty(); }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }

  void push_back(double dx_k, double v_k, double dv_k, double a_k, double u_k);
  void reserve(std::size_t n);

  /// Throws DataError if dt <= 0 or the columns differ in length.
  void validate() const;
};

inline constexpr const char* kTrajectoryHeader = "t,dx,v_ego,dv,a_ego,u_lead";

/// `t,dx,v_ego,dv,a_ego,u_lead`, one row per sample, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
std::string trajectory_to_csv(const Trajectory& traj);

/// Reads the format written by write_trajectory_csv. Requires uniform time
/// spacing; dt is taken from the first two rows.
Trajectory read_trajectory_csv(std::istream& in, const std::string& source = "<trajectory>");

}  // namespace msdc
