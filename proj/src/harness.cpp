#include "msdc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "msdc/csv.hpp"
#include "msdc/error.hpp"
#include "msdc/simulation.hpp"

namespace msdc {
namespace {

double power(std::span<const double> s) {
  double acc = 0.0;
  for (double v : s) acc += v * v;
  return acc;
}

double relative_error(const Eigen::Vector3d& est, const Eigen::Vector3d& truth) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double denom = std::abs(truth(i)) > 0.0 ? std::abs(truth(i)) : 1.0;
    worst = std::max(worst, std::abs(est(i) - truth(i)) / denom);
  }
  return worst;
}

}  // namespace

void ScenarioSpec::validate() const {
  params.validate();
  if (!(horizon > 0.0)) throw ConfigError(fmt::format("scenario horizon must be > 0, got {}", horizon));
  if (!(dt > 0.0)) throw ConfigError(fmt::format("scenario dt must be > 0, got {}", dt));
  for (double s : snr_db) {
    if (!std::isfinite(s)) throw ConfigError("noise levels must be finite SNR values in dB");
  }
}

ScenarioSpec ScenarioSpec::table1() {
  ScenarioSpec spec;
  spec.snr_db = {30.0, 15.0, 5.0};
  return spec;
}

ScenarioRun run_scenario(const ScenarioSpec& spec) {
  spec.validate();
  ScenarioRun run;
  run.clean = simulate_euler(spec.params, spec.lead, CFState{spec.dx0, spec.v0}, spec.horizon, spec.dt, spec.mode);
  for (std::size_t i = 0; i < spec.snr_db.size(); ++i) {
    const std::uint64_t level_seed = spec.seed * 1000003ULL + i;
    run.noisy.push_back({spec.snr_db[i], add_measurement_noise(run.clean, spec.snr_db[i], level_seed)});
  }
  return run;
}

std::vector<double> inject_noise(std::span<const double> signal, double snr_db, std::uint64_t seed) {
  if (snr_db == kNoNoise) return {signal.begin(), signal.end()};
  if (!std::isfinite(snr_db)) throw ConfigError("inject_noise: SNR must be finite or +inf");
  const double p_signal = power(signal);
  if (!(p_signal > 0.0)) throw DataError("inject_noise: signal has zero power, SNR undefined");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noise(signal.size());
  for (auto& e : noise) e = normal(rng);
  const double p_noise = power(noise);
  if (!(p_noise > 0.0)) throw NumericError("inject_noise: degenerate noise draw");

  // Scale by the realized draw so the measured SNR hits the target exactly.
  const double gain = std::sqrt(p_signal / (p_noise * std::pow(10.0, snr_db / 10.0)));
  std::vector<double> out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) out[i] = signal[i] + gain * noise[i];
  return out;
}

double measure_snr(std::span<const double> clean, std::span<const double> noisy) {
  if (clean.size() != noisy.size()) throw DataError("measure_snr: series lengths differ");
  const double p_clean = power(clean);
  if (!(p_clean > 0.0)) throw DataError("measure_snr: clean signal has zero power, SNR undefined");
  double p_noise = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double e = noisy[i] - clean[i];
    p_noise += e * e;
  }
  if (p_noise == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(p_clean / p_noise);
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw DataError(fmt::format("rmse: length mismatch ({} vs {})", predicted.size(), actual.size()));
  }
  if (predicted.empty()) throw DataError("rmse: empty series");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(predicted.size()));
}

Trajectory add_measurement_noise(const Trajectory& clean, double snr_db, std::uint64_t seed) {
  Trajectory out = clean;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::array<std::uint64_t, 4> channel_seeds{};
  std::array<std::uint32_t, 8> words{};
  seq.generate(words.begin(), words.end());
  for (std::size_t c = 0; c < 4; ++c) {
    channel_seeds[c] = (static_cast<std::uint64_t>(words[2 * c]) << 32) | words[2 * c + 1];
  }
  out.dx = inject_noise(clean.dx, snr_db, channel_seeds[0]);
  out.v_ego = inject_noise(clean.v_ego, snr_db, channel_seeds[1]);
  out.dv = inject_noise(clean.dv, snr_db, channel_seeds[2]);
  out.a_ego = inject_noise(clean.a_ego, snr_db, channel_seeds[3]);
  return out;
}

IdentificationReport identify_trajectory(const Trajectory& traj, const BankConfig& cfg,
                                         const StudyOptions& opts) {
  traj.validate();
  if (traj.size() < 2) throw DataError("identification needs at least two samples");

  DelayBank bank(cfg);
  IdentificationReport report;
  for (const auto& h : bank.hypotheses()) report.delays.push_back(h.d);

  const Eigen::Vector3d to_physical = cfg.scale.cwiseProduct(opts.input_scale);
  std::optional<int> selected;
  std::vector<double> sq_errors;
  std::vector<std::optional<long>> ready_at(bank.hypotheses().size());
  for (long k = 1; k < static_cast<long>(traj.size()); ++k) {
    IdentificationStep step;
    step.k = k;
    if (selected) {
      if (const auto s = bank.sample(traj, k, *selected)) {
        step.predicted = predict(bank.hypothesis(*selected).estimator.params(), s->x);
        step.actual = s->y;
        sq_errors.push_back(step.predicted - step.actual);
      }
    }

    bank.step(traj, k);
    for (std::size_t i = 0; i < ready_at.size(); ++i) {
      if (!ready_at[i] && bank.hypotheses()[i].estimator.samples_seen() >= cfg.warmup) ready_at[i] = k;
    }
    const auto now = bank.select_delay();
    if (now) {
      if (!report.warmup_step) report.warmup_step = k;
      if (selected && *selected != *now) report.last_switch_step = k;
      step.d_star = *now;
      step.params = bank.hypothesis(*now).estimator.params().cwiseProduct(to_physical);
    }
    selected = now;

    std::vector<double> js;
    js.reserve(bank.hypotheses().size());
    for (const auto& h : bank.hypotheses()) js.push_back(h.j);
    report.j_history.push_back(std::move(js));
    report.steps.push_back(step);
  }

  const auto& last = report.steps.back();
  report.final_delay = last.d_star;
  report.final_params = last.params;
  for (std::size_t i = 0; i < ready_at.size(); ++i) {
    if (report.delays[i] == report.final_delay) report.final_delay_warmup_step = ready_at[i];
  }
  if (!sq_errors.empty()) {
    const std::vector<double> zeros(sq_errors.size(), 0.0);
    report.prediction_rmse = rmse(sq_errors, zeros);
  }

  if (opts.truth) {
    report.terminal_error = relative_error(report.final_params, *opts.truth);
    // Convergence: first step after which every later step stays within tolerance.
    std::optional<long> candidate;
    for (const auto& s : report.steps) {
      const bool ok = s.d_star != 0 && relative_error(s.params, *opts.truth) < opts.convergence_tol;
      if (ok && !candidate) candidate = s.k;
      if (!ok) candidate.reset();
    }
    report.convergence_step = candidate;
  }
  return report;
}

std::vector<IdentificationReport> identification_study(const ScenarioSpec& spec, const BankConfig& cfg,
                                                       StudyOptions opts) {
  if (!opts.truth) {
    const auto t = ident_triple(spec.params, 0);
    opts.truth = Eigen::Vector3d(t.alpha_id, t.beta_id, t.gamma_id);
  }
  const ScenarioRun run = run_scenario(spec);
  std::vector<IdentificationReport> reports;
  reports.push_back(identify_trajectory(run.clean, cfg, opts));
  reports.back().snr_db = kNoNoise;
  for (const auto& n : run.noisy) {
    reports.push_back(identify_trajectory(n.trajectory, cfg, opts));
    reports.back().snr_db = n.snr_db;
  }
  return reports;
}

std::vector<Episode> prepare_episodes(std::istream& raw, const std::string& source_id,
                                      const EpisodeRules& rules) {
  const auto table = csv::read_numeric(raw, source_id);
  if (table.header != csv::split_row(kEpisodeHeader)) {
    throw DataError(fmt::format("{}: expected header '{}'", source_id, kEpisodeHeader));
  }
  const auto& rows = table.rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (double v : rows[i]) {
      if (!std::isfinite(v)) throw DataError(fmt::format("{}:{}: non-finite value", source_id, table.line_numbers[i]));
    }
    if (i > 0) {
      const double step = rows[i][0] - rows[i - 1][0];
      if (!(step > 0.0)) {
        throw DataError(fmt::format("{}:{}: time is not increasing", source_id, table.line_numbers[i]));
      }
      if (std::abs(step - rules.sample_dt) > 1e-6 * rules.sample_dt) {
        throw DataError(fmt::format("{}:{}: sample spacing {} differs from {}", source_id,
                                    table.line_numbers[i], step, rules.sample_dt));
      }
    }
  }

  std::vector<Episode> episodes;
  auto flush = [&](std::size_t begin, std::size_t end, bool after_jump) {
    if (end - begin < rules.min_samples) return;
    Episode ep;
    ep.source_id = source_id;
    ep.scale = rules.scale;
    ep.first_row = begin;
    ep.starts_after_jump = after_jump;
    ep.trajectory.dt = rules.sample_dt;
    ep.trajectory.t0 = rows[begin][0];
    ep.trajectory.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = rows[i];  // time, v_ego, dx, dv, a
      ep.trajectory.push_back(r[2] * rules.scale(0), r[1] * rules.scale(1), r[3] * rules.scale(2), r[4],
                              r[1] + r[3]);
    }
    episodes.push_back(std::move(ep));
  };

  std::size_t begin = 0;
  bool after_jump = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::abs(rows[i][2] - rows[i - 1][2]) > rules.max_range_jump) {
      flush(begin, i, after_jump);
      begin = i;
      after_jump = true;
    }
  }
  if (!rows.empty()) flush(begin, rows.size(), after_jump);
  return episodes;
}

void write_episode_csv(std::ostream& out, const Trajectory& traj) {
  traj.validate();
  out << kEpisodeHeader << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << csv::format_number(traj.time(k)) << ',' << csv::format_number(traj.v_ego[k]) << ','
        << csv::format_number(traj.dx[k]) << ',' << csv::format_number(traj.dv[k]) << ','
        << csv::format_number(traj.a_ego[k]) << '\n';
  }
}

IdentificationReport identify_episode(const Episode& ep, const BankConfig& cfg, StudyOptions opts) {
  opts.input_scale = ep.scale;
  return identify_trajectory(ep.trajectory, cfg, opts);
}

}  // namespace msdc
