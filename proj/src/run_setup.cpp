#include "msdc/run_setup.hpp"

#include <fstream>

#include <fmt/format.h>

#include "msdc/csv.hpp"
#include "msdc/error.hpp"

namespace msdc {
namespace {

std::filesystem::path existing_file(const RunConfig& cfg, const ConfigSection& sec, std::string_view key) {
  std::filesystem::path p = sec.get_string(key);
  if (p.is_relative()) p = cfg.base_dir() / p;
  if (!std::filesystem::is_regular_file(p)) {
    throw ConfigError(fmt::format("{}: [{}] {}: file '{}' does not exist", cfg.source(), sec.name(), key, p.string()));
  }
  return p;
}

LeadProfile lead_from_section(const RunConfig& cfg, const ConfigSection& sec) {
  const std::string kind = sec.get_string_or("lead", "exponential");
  if (kind == "constant") return LeadProfile::constant(sec.get_double("lead_speed"));
  if (kind == "exponential") {
    return LeadProfile::exponential_approach(sec.get_double_or("lead_a", 15.0), sec.get_double_or("lead_b", 5.0),
                                             sec.get_double_or("lead_c", 0.05));
  }
  if (kind == "samples") {
    const auto path = existing_file(cfg, sec, "lead_file");
    std::ifstream in(path);
    const auto table = csv::read_numeric(in, path.string());
    if (table.header != std::vector<std::string>{"t", "u"}) {
      throw DataError(fmt::format("{}: expected header 't,u'", path.string()));
    }
    std::vector<double> t, u;
    for (const auto& r : table.rows) {
      t.push_back(r[0]);
      u.push_back(r[1]);
    }
    return LeadProfile::piecewise_linear(std::move(t), std::move(u));
  }
  throw ConfigError(fmt::format("{}: [simulation] lead: unknown profile '{}' (constant, exponential, samples)",
                                cfg.source(), kind));
}

}  // namespace

Integrator parse_integrator(const std::string& text) {
  if (text == "euler") return Integrator::Euler;
  if (text == "dde") return Integrator::Dde;
  throw ConfigError(fmt::format("unknown integrator '{}' (expected euler or dde)", text));
}

SimulationSetup simulation_from_config(const RunConfig& cfg) {
  SimulationSetup setup;
  ScenarioSpec& spec = setup.scenario;
  spec.params = cf_params_from_config(cfg.section("model"));

  const auto& sim = cfg.section_or_empty("simulation");
  sim.reject_unknown({"horizon", "dt", "v0", "dx0", "mode", "integrator", "lead", "lead_speed", "lead_a",
                      "lead_b", "lead_c", "lead_file", "history_eps"});
  spec.horizon = sim.get_double_or("horizon", spec.horizon);
  spec.dt = sim.get_double_or("dt", spec.dt);
  spec.v0 = sim.get_double_or("v0", spec.v0);
  spec.dx0 = sim.get_double_or("dx0", spec.dx0);
  spec.mode = parse_mode(sim.get_string_or("mode", "linear"));
  setup.integrator = parse_integrator(sim.get_string_or("integrator", "euler"));
  spec.lead = lead_from_section(cfg, sim);
  if (sim.has("history_eps")) setup.history_eps = sim.get_double("history_eps");

  const auto& noise = cfg.section_or_empty("noise");
  noise.reject_unknown({"snr_db", "seed"});
  if (noise.has("snr_db")) spec.snr_db = noise.get_double_list("snr_db");
  spec.seed = static_cast<std::uint64_t>(noise.get_int_or("seed", 1));
  spec.validate();
  return setup;
}

StabilitySetup stability_from_config(const RunConfig& cfg) {
  const auto& sec = cfg.section_or_empty("stability");
  sec.reject_unknown({"alpha_min", "alpha_max", "alpha_count", "beta_min", "beta_max", "beta_count", "tau_min",
                      "tau_max", "tau_count", "slope_s", "poly_order", "quad_order"});
  auto count = [&](std::string_view key, std::int64_t fallback) {
    const auto n = sec.get_int_or(key, fallback);
    if (n < 1) throw ConfigError(fmt::format("{}: [stability] {} must be >= 1", cfg.source(), key));
    return static_cast<std::size_t>(n);
  };
  StabilitySetup s;
  s.alpha_values = linspace(sec.get_double_or("alpha_min", 0.01), sec.get_double_or("alpha_max", 2.0),
                            count("alpha_count", 100));
  s.beta_values = linspace(sec.get_double_or("beta_min", 0.01), sec.get_double_or("beta_max", 8.0),
                           count("beta_count", 100));
  s.tau_values = linspace(sec.get_double_or("tau_min", 0.2), sec.get_double_or("tau_max", 2.0),
                          count("tau_count", 6));
  double default_slope = 5.0;
  if (cfg.has_section("model") && cfg.section("model").has("slope_s")) {
    default_slope = cfg.section("model").get_double("slope_s");
  }
  s.slope_s = sec.get_double_or("slope_s", default_slope);
  s.sem.poly_order = static_cast<int>(sec.get_int_or("poly_order", 20));
  s.sem.quad_order = static_cast<int>(sec.get_int_or("quad_order", 0));
  s.sem.validate();
  return s;
}

IdentificationSetup identification_from_config(const RunConfig& cfg) {
  const auto& sec = cfg.section_or_empty("identification");
  sec.reject_unknown({"d_min", "d_max", "lambda", "delta", "eta_learn", "warmup", "scale_dx", "scale_v",
                      "scale_dv", "target", "convergence_tol", "trajectory"});
  IdentificationSetup s;
  BankConfig& b = s.bank;
  b.d_min = static_cast<int>(sec.get_int_or("d_min", b.d_min));
  b.d_max = static_cast<int>(sec.get_int_or("d_max", b.d_max));
  b.lambda = sec.get_double_or("lambda", b.lambda);
  b.delta = sec.get_double_or("delta", b.delta);
  b.eta_learn = sec.get_double_or("eta_learn", b.eta_learn);
  b.warmup = sec.get_int_or("warmup", b.warmup);
  b.scale = Eigen::Vector3d(sec.get_double_or("scale_dx", 1.0), sec.get_double_or("scale_v", 1.0),
                            sec.get_double_or("scale_dv", 1.0));
  const std::string target = sec.get_string_or("target", "acceleration");
  if (target == "acceleration") {
    b.target = TargetSignal::Acceleration;
  } else if (target == "speed_difference") {
    b.target = TargetSignal::SpeedDifference;
  } else {
    throw ConfigError(fmt::format("{}: [identification] target: unknown value '{}'", cfg.source(), target));
  }
  b.validate();
  s.options.convergence_tol = sec.get_double_or("convergence_tol", s.options.convergence_tol);
  if (sec.has("trajectory")) s.trajectory = existing_file(cfg, sec, "trajectory");
  return s;
}

Trajectory simulate(const SimulationSetup& setup) {
  const auto& spec = setup.scenario;
  if (setup.integrator == Integrator::Euler) {
    return simulate_euler(spec.params, spec.lead, CFState{spec.dx0, spec.v0}, spec.horizon, spec.dt, spec.mode);
  }
  const History hist = setup.history_eps
                           ? History::perturbed_steady_state(spec.lead.speed(0.0), reduce(spec.params), *setup.history_eps)
                           : History::constant(CFState{spec.dx0, spec.v0});
  return simulate_dde(spec.params, spec.lead, hist, spec.horizon, spec.dt, spec.mode);
}

}  // namespace msdc
