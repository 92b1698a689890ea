#pragma once

// Builds run inputs from the sections of a RunConfig. Each reader rejects
// keys it does not know.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "msdc/config.hpp"
#include "msdc/harness.hpp"
#include "msdc/identifier.hpp"
#include "msdc/sem.hpp"
#include "msdc/simulation.hpp"

namespace msdc {

enum class Integrator { Euler, Dde };

struct SimulationSetup {
  ScenarioSpec scenario;
  Integrator integrator = Integrator::Euler;
  /// DDE history: the initial state, or the steady state for lead(0) scaled by (1 + eps).
  std::optional<double> history_eps;
};

/// [model] (required) + [simulation] + [noise].
SimulationSetup simulation_from_config(const RunConfig& cfg);

struct StabilitySetup {
  std::vector<double> alpha_values;
  std::vector<double> beta_values;
  std::vector<double> tau_values;
  double slope_s = 5.0;
  SEMConfig sem;
};

/// [stability]; defaults reproduce the 100 x 100 grid over alpha in [0.01, 2],
/// beta in [0.01, 8] and 6 delays in [0.2, 2].
StabilitySetup stability_from_config(const RunConfig& cfg);

struct IdentificationSetup {
  BankConfig bank;
  StudyOptions options;
  /// Trajectory CSV to identify instead of simulating, resolved against the config directory.
  std::optional<std::filesystem::path> trajectory;
};

/// [identification]; defaults are d in 2..10, lambda 0.95, delta 10, eta 0.05.
IdentificationSetup identification_from_config(const RunConfig& cfg);

Integrator parse_integrator(const std::string& text);

/// Runs the configured integrator on the scenario (no noise).
Trajectory simulate(const SimulationSetup& setup);

}  // namespace msdc
