#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "msdc/harness.hpp"
#include "msdc/sem.hpp"
#include "msdc/trajectory.hpp"

namespace msdc {

/// `<prefix>params.csv` (k,d_star,alpha_id,beta_id,gamma_id,predicted,actual),
/// `<prefix>J.csv` (k,J_d...), and convergence / J-vs-d SVGs.
void write_identification_report(const std::filesystem::path& dir, const IdentificationReport& report,
                                 const std::string& prefix);

/// Per-level reports plus `summary.csv` and comparison plots across levels.
void write_study(const std::filesystem::path& dir, const std::vector<IdentificationReport>& reports,
                 const Trajectory& clean);

/// Lead and ego speed traces.
std::string speed_plot(const Trajectory& traj);

/// File-name tag for a noise level: "clean" or "snr30".
std::string noise_tag(double snr_db);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace msdc
