#include "msdc/report.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "msdc/csv.hpp"
#include "msdc/error.hpp"
#include "msdc/svg.hpp"

namespace msdc {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::string optional_number(const std::optional<long>& v) { return v ? std::to_string(*v) : ""; }

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string noise_tag(double snr_db) {
  return std::isfinite(snr_db) ? fmt::format("snr{:g}", snr_db) : "clean";
}

std::string speed_plot(const Trajectory& traj) {
  svg::LinePlot plot{"vehicle speeds", "t [s]", "speed [m/s]", {}};
  svg::Series lead{"lead", {}, traj.u_lead};
  svg::Series ego{"ego", {}, traj.v_ego};
  for (std::size_t k = 0; k < traj.size(); ++k) {
    lead.x.push_back(traj.time(k));
    ego.x.push_back(traj.time(k));
  }
  plot.series = {lead, ego};
  return svg::render(plot);
}

void write_identification_report(const std::filesystem::path& dir, const IdentificationReport& report,
                                 const std::string& prefix) {
  {
    auto out = open_out(dir / (prefix + "params.csv"));
    out << "k,d_star,alpha_id,beta_id,gamma_id,predicted,actual\n";
    for (const auto& s : report.steps) {
      out << s.k << ',' << s.d_star << ',' << csv::format_number(s.params(0)) << ','
          << csv::format_number(s.params(1)) << ',' << csv::format_number(s.params(2)) << ','
          << csv::format_number(s.predicted) << ',' << csv::format_number(s.actual) << '\n';
    }
  }
  {
    auto out = open_out(dir / (prefix + "J.csv"));
    out << 'k';
    for (int d : report.delays) out << ",J_d" << d;
    out << '\n';
    for (std::size_t i = 0; i < report.steps.size(); ++i) {
      out << report.steps[i].k;
      for (double j : report.j_history[i]) out << ',' << csv::format_number(j);
      out << '\n';
    }
  }

  const char* names[] = {"alpha_id", "beta_id", "gamma_id"};
  svg::LinePlot params{fmt::format("online parameters ({})", noise_tag(report.snr_db)), "step k", "value", {}};
  for (int c = 0; c < 3; ++c) {
    svg::Series s{names[c], {}, {}};
    for (const auto& st : report.steps) {
      if (st.d_star == 0) continue;
      s.x.push_back(static_cast<double>(st.k));
      s.y.push_back(st.params(c));
    }
    params.series.push_back(std::move(s));
  }
  write_text(dir / (prefix + "params.svg"), svg::render(params));

  svg::LinePlot jplot{fmt::format("accumulated prediction error ({})", noise_tag(report.snr_db)), "step k", "J", {}};
  for (std::size_t di = 0; di < report.delays.size(); ++di) {
    svg::Series s{fmt::format("d = {}", report.delays[di]), {}, {}};
    for (std::size_t i = 0; i < report.steps.size(); ++i) {
      s.x.push_back(static_cast<double>(report.steps[i].k));
      s.y.push_back(report.j_history[i][di]);
    }
    jplot.series.push_back(std::move(s));
  }
  write_text(dir / (prefix + "J.svg"), svg::render(jplot));

  svg::LinePlot jd{fmt::format("final J versus delay ({})", noise_tag(report.snr_db)), "d [steps]", "J", {}};
  svg::Series final_j{"J(d)", {}, {}};
  for (std::size_t di = 0; di < report.delays.size(); ++di) {
    final_j.x.push_back(report.delays[di]);
    final_j.y.push_back(report.j_history.back()[di]);
  }
  jd.series.push_back(std::move(final_j));
  write_text(dir / (prefix + "J_vs_d.svg"), svg::render(jd));
}

void write_study(const std::filesystem::path& dir, const std::vector<IdentificationReport>& reports,
                 const Trajectory& clean) {
  auto summary = open_out(dir / "summary.csv");
  summary << "snr_db,final_delay,alpha_id,beta_id,gamma_id,terminal_error,warmup_step,convergence_step,prediction_rmse\n";
  for (const auto& r : reports) {
    summary << (std::isfinite(r.snr_db) ? csv::format_number(r.snr_db) : "inf") << ',' << r.final_delay << ','
            << csv::format_number(r.final_params(0)) << ',' << csv::format_number(r.final_params(1)) << ','
            << csv::format_number(r.final_params(2)) << ',' << csv::format_number(r.terminal_error) << ','
            << optional_number(r.warmup_step) << ',' << optional_number(r.convergence_step) << ','
            << csv::format_number(r.prediction_rmse) << '\n';
    write_identification_report(dir, r, noise_tag(r.snr_db) + "_");
  }
  write_text(dir / "speeds.svg", speed_plot(clean));

  const char* names[] = {"alpha_id", "beta_id", "gamma_id"};
  for (int c = 0; c < 3; ++c) {
    svg::LinePlot plot{fmt::format("{} under different noise levels", names[c]), "step k", names[c], {}};
    for (const auto& r : reports) {
      svg::Series s{noise_tag(r.snr_db), {}, {}};
      for (const auto& st : r.steps) {
        if (st.d_star == 0) continue;
        s.x.push_back(static_cast<double>(st.k));
        s.y.push_back(st.params(c));
      }
      plot.series.push_back(std::move(s));
    }
    write_text(dir / fmt::format("{}_vs_noise.svg", names[c]), svg::render(plot));
  }
}

}  // namespace msdc
