#include "msdc/trajectory.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "msdc/csv.hpp"
#include "msdc/error.hpp"

namespace msdc {

void Trajectory::push_back(double dx_k, double v_k, double dv_k, double a_k, double u_k) {
  dx.push_back(dx_k);
  v_ego.push_back(v_k);
  dv.push_back(dv_k);
  a_ego.push_back(a_k);
  u_lead.push_back(u_k);
}

void Trajectory::reserve(std::size_t n) {
  dx.reserve(n);
  v_ego.reserve(n);
  dv.reserve(n);
  a_ego.reserve(n);
  u_lead.reserve(n);
}

void Trajectory::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DataError(fmt::format("trajectory dt must be > 0, got {}", dt));
  const auto n = dx.size();
  if (v_ego.size() != n || dv.size() != n || a_ego.size() != n || u_lead.size() != n) {
    throw DataError("trajectory columns have different lengths");
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  traj.validate();
  out << kTrajectoryHeader << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << csv::format_number(traj.time(k)) << ',' << csv::format_number(traj.dx[k]) << ','
        << csv::format_number(traj.v_ego[k]) << ',' << csv::format_number(traj.dv[k]) << ','
        << csv::format_number(traj.a_ego[k]) << ',' << csv::format_number(traj.u_lead[k]) << '\n';
  }
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::ostringstream ss;
  write_trajectory_csv(ss, traj);
  return ss.str();
}

Trajectory read_trajectory_csv(std::istream& in, const std::string& source) {
  const auto table = csv::read_numeric(in, source);
  if (table.header != csv::split_row(kTrajectoryHeader)) {
    throw DataError(fmt::format("{}: expected header '{}'", source, kTrajectoryHeader));
  }
  Trajectory traj;
  traj.reserve(table.rows.size());
  if (!table.rows.empty()) traj.t0 = table.rows.front()[0];
  if (table.rows.size() >= 2) {
    traj.dt = table.rows[1][0] - table.rows[0][0];
    if (!(traj.dt > 0.0)) throw DataError(fmt::format("{}: time must be increasing", source));
  }
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& r = table.rows[k];
    const double expected = traj.time(k);
    if (std::abs(r[0] - expected) > 1e-6 * traj.dt) {
      throw DataError(fmt::format("{}:{}: non-uniform time step (t = {}, expected {})", source,
                                  table.line_numbers[k], r[0], expected));
    }
    traj.push_back(r[1], r[2], r[3], r[4], r[5]);
  }
  return traj;
}

}  // namespace msdc
