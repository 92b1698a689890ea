// Command-line front end: simulate, stability, identify, study.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "msdc/config.hpp"
#include "msdc/error.hpp"
#include "msdc/harness.hpp"
#include "msdc/report.hpp"
#include "msdc/run_setup.hpp"
#include "msdc/sem.hpp"
#include "msdc/svg.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct GlobalOptions {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

msdc::RunConfig load_config(const GlobalOptions& g) {
  if (g.config.empty()) {
    std::istringstream empty;
    return msdc::RunConfig::parse(empty, "<defaults>");
  }
  return msdc::RunConfig::load(g.config);
}

fs::path prepare_out(const GlobalOptions& g) {
  fs::path out(g.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw msdc::DataError(fmt::format("cannot create output directory '{}': {}", g.out, ec.message()));
  return out;
}

int cmd_simulate(const GlobalOptions& g, const std::optional<std::string>& mode,
                 const std::optional<std::string>& integrator, bool plot) {
  const auto cfg = load_config(g);
  auto setup = msdc::simulation_from_config(cfg);
  if (mode) setup.scenario.mode = msdc::parse_mode(*mode);
  if (integrator) setup.integrator = msdc::parse_integrator(*integrator);
  const auto traj = msdc::simulate(setup);

  const auto out = prepare_out(g);
  msdc::write_text(out / "trajectory.csv", msdc::trajectory_to_csv(traj));
  if (plot) msdc::write_text(out / "speeds.svg", msdc::speed_plot(traj));
  if (traj.status == msdc::RunStatus::Diverged) {
    std::cerr << fmt::format("warning: simulation diverged at t = {} s; trajectory truncated\n", traj.diverged_at);
  }
  std::cout << fmt::format("wrote {} rows to {}\n", traj.size(), (out / "trajectory.csv").string());
  return kExitOk;
}

int cmd_stability(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto setup = msdc::stability_from_config(cfg);
  const auto grid = msdc::stability_sweep(setup.alpha_values, setup.beta_values, setup.tau_values, setup.slope_s,
                                          setup.sem, g.threads);
  const auto out = prepare_out(g);
  {
    std::ofstream csv(out / "stability.csv");
    msdc::write_stability_csv(csv, grid);
  }
  for (std::size_t it = 0; it < grid.tau_values.size(); ++it) {
    msdc::write_text(out / fmt::format("stability_tau{}.svg", it), msdc::svg::render_stability_panel(grid, it));
    std::cout << fmt::format("tau = {:.4g}: {} stable cells\n", grid.tau_values[it], grid.stable_count(it));
  }
  if (const auto errors = grid.error_count()) {
    std::cerr << fmt::format("warning: {} cells could not be evaluated (stable=error)\n", errors);
  }
  return kExitOk;
}

int cmd_identify(const GlobalOptions& g, const std::optional<std::string>& trajectory_path,
                 const std::optional<double>& snr) {
  const auto cfg = load_config(g);
  auto ident = msdc::identification_from_config(cfg);
  if (trajectory_path) ident.trajectory = fs::path(*trajectory_path);

  msdc::Trajectory traj;
  if (ident.trajectory) {
    std::ifstream in(*ident.trajectory);
    if (!in) throw msdc::DataError(fmt::format("cannot open trajectory '{}'", ident.trajectory->string()));
    traj = msdc::read_trajectory_csv(in, ident.trajectory->string());
  } else {
    const auto setup = msdc::simulation_from_config(cfg);
    traj = msdc::simulate(setup);
    const auto t = msdc::ident_triple(setup.scenario.params, 0);
    ident.options.truth = Eigen::Vector3d(t.alpha_id, t.beta_id, t.gamma_id);
  }
  if (traj.empty()) throw msdc::DataError("trajectory is empty");

  double level = msdc::kNoNoise;
  if (snr) {
    const std::uint64_t seed = g.seed.value_or(cfg.section_or_empty("noise").get_int_or("seed", 1));
    traj = msdc::add_measurement_noise(traj, *snr, seed);
    level = *snr;
  }
  auto report = msdc::identify_trajectory(traj, ident.bank, ident.options);
  report.snr_db = level;

  const auto out = prepare_out(g);
  msdc::write_identification_report(out, report, "");
  std::cout << fmt::format("selected d = {}, parameters = ({:.6g}, {:.6g}, {:.6g}), prediction RMSE = {:.4g}\n",
                           report.final_delay, report.final_params(0), report.final_params(1),
                           report.final_params(2), report.prediction_rmse);
  return kExitOk;
}

int cmd_study(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  auto setup = msdc::simulation_from_config(cfg);
  if (g.seed) setup.scenario.seed = *g.seed;
  if (!cfg.section_or_empty("noise").has("snr_db")) setup.scenario.snr_db = {30.0, 15.0, 5.0};
  const auto ident = msdc::identification_from_config(cfg);
  const auto reports = msdc::identification_study(setup.scenario, ident.bank, ident.options);
  const auto run = msdc::run_scenario(setup.scenario);

  const auto out = prepare_out(g);
  msdc::write_text(out / "trajectory.csv", msdc::trajectory_to_csv(run.clean));
  msdc::write_study(out, reports, run.clean);
  for (const auto& r : reports) {
    std::cout << fmt::format("{:>6}: d* = {}, params = ({:.5g}, {:.5g}, {:.5g}), terminal error = {:.3g}\n",
                             msdc::noise_tag(r.snr_db), r.final_delay, r.final_params(0), r.final_params(1),
                             r.final_params(2), r.terminal_error);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mass-spring-damper-clutch car-following model: simulation, stability, identification"};
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config, "Run configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed_value, "Noise seed");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");

  std::optional<std::string> mode, integrator, trajectory;
  std::optional<double> snr;
  bool plot = false;

  auto* sim = app.add_subcommand("simulate", "Simulate the following scenario to trajectory.csv");
  sim->add_option("--mode", mode, "linear or nonlinear relaxation law")->check(CLI::IsMember({"linear", "nonlinear"}));
  sim->add_option("--integrator", integrator, "euler or dde")->check(CLI::IsMember({"euler", "dde"}));
  sim->add_flag("--plot", plot, "Also write speeds.svg");

  auto* stab = app.add_subcommand("stability", "Sweep the (alpha, beta, tau) stability grid");

  auto* ident = app.add_subcommand("identify", "Run the delay bank on a trajectory");
  ident->add_option("--trajectory", trajectory, "Trajectory CSV (default: simulate from the config)");
  ident->add_option("--snr", snr, "Add measurement noise at this SNR [dB] before identifying");

  auto* study = app.add_subcommand("study", "Identification under all configured noise levels");

  for (auto* sub : {sim, stab, ident, study}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (*sim) return cmd_simulate(g, mode, integrator, plot);
    if (*stab) return cmd_stability(g);
    if (*ident) return cmd_identify(g, trajectory, snr);
    if (*study) return cmd_study(g);
  } catch (const msdc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case msdc::ErrorKind::Config: return kExitConfig;
      case msdc::ErrorKind::Data: return kExitData;
      case msdc::ErrorKind::Numeric: return kExitNumeric;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
