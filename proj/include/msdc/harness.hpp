#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "msdc/identifier.hpp"
#include "msdc/lead_profile.hpp"
#include "msdc/model.hpp"
#include "msdc/trajectory.hpp"

namespace msdc {

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct ScenarioSpec {
  CFParams params = CFParams::table1();
  LeadProfile lead = LeadProfile::scenario_default();
  double v0 = 5.0;
  double dx0 = 20.0;
  double horizon = 50.0;
  double dt = 0.1;
  Mode mode = Mode::Linear;
  std::vector<double> snr_db;  // one noisy copy per level
  std::uint64_t seed = 1;

  void validate() const;

  /// 50 s horizon, v0 = 5 m/s, headway 20 m, noise levels 30 / 15 / 5 dB.
  static ScenarioSpec table1();
};

struct NoisyTrajectory {
  double snr_db = kNoNoise;
  Trajectory trajectory;
};

struct ScenarioRun {
  Trajectory clean;
  std::vector<NoisyTrajectory> noisy;
};

/// Euler simulation plus one measurement-noise copy per level.
ScenarioRun run_scenario(const ScenarioSpec& spec);

/// Adds zero-mean Gaussian noise rescaled so that the realized
/// 10 log10(sum clean^2 / sum noise^2) equals snr_db.
std::vector<double> inject_noise(std::span<const double> signal, double snr_db, std::uint64_t seed);

/// 10 log10(sum clean^2 / sum (noisy - clean)^2); +inf for identical series.
double measure_snr(std::span<const double> clean, std::span<const double> noisy);

double rmse(std::span<const double> predicted, std::span<const double> actual);

/// Independent noise on dx, v_ego, dv and a_ego; u_lead is kept clean.
Trajectory add_measurement_noise(const Trajectory& clean, double snr_db, std::uint64_t seed);

struct IdentificationStep {
  long k = 0;
  int d_star = 0;  // 0 while no estimator is warmed up
  Eigen::Vector3d params = Eigen::Vector3d::Zero();  // physical units, candidate d_star
  double predicted = 0.0;  // prior one-step prediction with the previous selection
  double actual = 0.0;
};

struct IdentificationReport {
  double snr_db = kNoNoise;
  std::vector<int> delays;
  std::vector<IdentificationStep> steps;
  std::vector<std::vector<double>> j_history;  // [step][delay index]
  std::optional<long> warmup_step;             // first k with a selectable delay
  std::optional<long> final_delay_warmup_step; // first k at which final_delay was selectable
  std::optional<long> convergence_step;
  int final_delay = 0;
  Eigen::Vector3d final_params = Eigen::Vector3d::Zero();
  double terminal_error = std::numeric_limits<double>::quiet_NaN();
  double prediction_rmse = std::numeric_limits<double>::quiet_NaN();
  /// Largest k at which the selected delay changed.
  long last_switch_step = 0;
};

struct StudyOptions {
  /// Relative error bound on every component for convergence.
  double convergence_tol = 0.01;
  /// Reference parameters for error metrics; empty disables them.
  std::optional<Eigen::Vector3d> truth;
  /// Multipliers already applied to the (dx, v, dv) columns of the input.
  Eigen::Vector3d input_scale = Eigen::Vector3d::Ones();
};

/// Runs a delay bank over every index of `traj` and records the selection,
/// parameters and J curves per step.
IdentificationReport identify_trajectory(const Trajectory& traj, const BankConfig& cfg,
                                         const StudyOptions& opts = {});

/// Identification on the clean trajectory and each noisy copy of `spec`,
/// reported in that order. Truth defaults to the scenario's own parameters.
std::vector<IdentificationReport> identification_study(const ScenarioSpec& spec,
                                                       const BankConfig& cfg,
                                                       StudyOptions opts = {});

struct EpisodeRules {
  double sample_dt = 0.1;
  /// |dx(k) - dx(k-1)| above this starts a new segment.
  double max_range_jump = 10.0;
  std::size_t min_samples = 50;
  Eigen::Vector3d scale{1.0 / 40.0, 1.0 / 30.0, 1.0 / 4.0};
};

struct Episode {
  /// dx, v_ego, dv multiplied by `scale`; a_ego and u_lead in physical units.
  Trajectory trajectory;
  std::string source_id;
  Eigen::Vector3d scale = Eigen::Vector3d::Ones();
  std::size_t first_row = 0;        // index of the segment's first raw row
  bool starts_after_jump = false;   // segment boundary came from a range jump
};

inline constexpr const char* kEpisodeHeader = "time,v_ego,dx,dv,a";

/// Splits a raw `time,v_ego,dx,dv,a` recording into scaled car-following
/// episodes, dropping segments shorter than rules.min_samples.
std::vector<Episode> prepare_episodes(std::istream& raw, const std::string& source_id,
                                      const EpisodeRules& rules = {});

/// Writes the raw episode format from a trajectory (physical units).
void write_episode_csv(std::ostream& out, const Trajectory& traj);

/// identify_trajectory with the episode's scaling mapped back out.
IdentificationReport identify_episode(const Episode& ep, const BankConfig& cfg,
                                      StudyOptions opts = {});

}  // namespace msdc
