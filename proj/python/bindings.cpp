#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msdc/error.hpp"
#include "msdc/harness.hpp"
#include "msdc/identifier.hpp"
#include "msdc/model.hpp"
#include "msdc/sem.hpp"
#include "msdc/simulation.hpp"

namespace py = pybind11;
using namespace msdc;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict trajectory_dict(const Trajectory& t) {
  std::vector<double> time(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) time[k] = t.time(k);
  py::dict d;
  d["t"] = to_array(time);
  d["dx"] = to_array(t.dx);
  d["v_ego"] = to_array(t.v_ego);
  d["dv"] = to_array(t.dv);
  d["a_ego"] = to_array(t.a_ego);
  d["u_lead"] = to_array(t.u_lead);
  d["diverged"] = t.status == RunStatus::Diverged;
  d["diverged_at"] = t.diverged_at;
  return d;
}

Trajectory trajectory_from(py::dict d, double dt) {
  auto column = [&](const char* key) {
    auto a = d[key].cast<py::array_t<double, py::array::c_style | py::array::forcecast>>();
    return std::vector<double>(a.data(), a.data() + a.size());
  };
  Trajectory t;
  t.dt = dt;
  t.dx = column("dx");
  t.v_ego = column("v_ego");
  t.dv = column("dv");
  t.a_ego = column("a_ego");
  t.u_lead = d.contains("u_lead") ? column("u_lead") : std::vector<double>(t.dx.size(), 0.0);
  t.validate();
  return t;
}

LeadProfile lead_from(py::object lead) {
  if (lead.is_none()) return LeadProfile::scenario_default();
  if (py::isinstance<py::float_>(lead) || py::isinstance<py::int_>(lead))
    return LeadProfile::constant(lead.cast<double>());
  auto abc = lead.cast<std::tuple<double, double, double>>();
  return LeadProfile::exponential_approach(std::get<0>(abc), std::get<1>(abc), std::get<2>(abc));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Delayed car-following model core";

  static py::exception<Error> base_error(m, "MsdcError");
  py::register_exception<ConfigError>(m, "ConfigError", base_error.ptr());
  py::register_exception<DataError>(m, "DataError", base_error.ptr());
  py::register_exception<NumericError>(m, "NumericError", base_error.ptr());

  py::enum_<Mode>(m, "Mode").value("Linear", Mode::Linear).value("Nonlinear", Mode::Nonlinear);

  py::class_<CFParams>(m, "CFParams")
      .def(py::init<>())
      .def_readwrite("mass_kg", &CFParams::mass_kg)
      .def_readwrite("stiffness", &CFParams::stiffness)
      .def_readwrite("damping", &CFParams::damping)
      .def_readwrite("slope_s", &CFParams::slope_s)
      .def_readwrite("delay_tau", &CFParams::delay_tau)
      .def_readwrite("v_low", &CFParams::v_low)
      .def_readwrite("v_high", &CFParams::v_high)
      .def_readwrite("x0_min", &CFParams::x0_min)
      .def_readwrite("x0_max", &CFParams::x0_max)
      .def("validate", &CFParams::validate)
      .def_static("table1", &CFParams::table1);

  py::class_<ReducedParams>(m, "ReducedParams")
      .def(py::init([](double a, double b, double s) { return ReducedParams{a, b, s}; }),
           py::arg("alpha"), py::arg("beta"), py::arg("slope_s"))
      .def_readwrite("alpha", &ReducedParams::alpha)
      .def_readwrite("beta", &ReducedParams::beta)
      .def_readwrite("slope_s", &ReducedParams::slope_s);

  m.def("relaxation_length", &relaxation_length, py::arg("v"), py::arg("params"));
  m.def("acceleration", &acceleration, py::arg("dx"), py::arg("v"), py::arg("dv"),
        py::arg("params"), py::arg("mode") = Mode::Linear);
  m.def(
      "steady_state",
      [](double u, const ReducedParams& r) {
        const auto s = steady_state(u, r);
        return std::make_pair(s.x1, s.x2);
      },
      py::arg("u"), py::arg("reduced"));

  m.def(
      "simulate_euler",
      [](const CFParams& p, py::object lead, double v0, double dx0, double horizon, double dt,
         Mode mode) {
        return trajectory_dict(simulate_euler(p, lead_from(lead), CFState{dx0, v0}, horizon, dt, mode));
      },
      py::arg("params"), py::arg("lead") = py::none(), py::arg("v0") = 5.0, py::arg("dx0") = 20.0,
      py::arg("horizon") = 50.0, py::arg("dt") = 0.1, py::arg("mode") = Mode::Linear,
      "Lead is a constant speed, an (a, b, c) tuple for a - b exp(-c t), or None for the default.");
  m.def(
      "simulate_dde",
      [](const ReducedParams& r, double tau, double u, double eps, double horizon, double h) {
        const auto hist = History::perturbed_steady_state(u, r, eps);
        return trajectory_dict(simulate_dde(r, tau, LeadProfile::constant(u), hist, horizon, h));
      },
      py::arg("reduced"), py::arg("tau"), py::arg("lead_speed"), py::arg("eps") = 0.1,
      py::arg("horizon") = 50.0, py::arg("h") = 0.01,
      "Constant lead speed, history at the steady state scaled by (1 + eps).");

  m.def(
      "is_stable",
      [](double alpha, double beta, double s, double tau, int order) {
        SEMConfig cfg;
        cfg.poly_order = order;
        const auto v = is_stable(alpha, beta, s, tau, cfg);
        return std::make_pair(v.stable, v.rho);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("slope_s"), py::arg("tau"),
      py::arg("poly_order") = 20, "Returns (stable, spectral radius).");
  m.def(
      "stability_sweep",
      [](std::vector<double> alphas, std::vector<double> betas, std::vector<double> taus, double s,
         int order, unsigned threads) {
        SEMConfig cfg;
        cfg.poly_order = order;
        StabilityGrid g;
        {
          py::gil_scoped_release release;
          g = stability_sweep(alphas, betas, taus, s, cfg, threads);
        }
        py::array_t<double> rho({taus.size(), betas.size(), alphas.size()});
        auto r = rho.mutable_unchecked<3>();
        for (std::size_t it = 0; it < taus.size(); ++it)
          for (std::size_t ib = 0; ib < betas.size(); ++ib)
            for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
              const auto& c = g.at(ia, ib, it);
              r(it, ib, ia) = c.status == CellStatus::Error ? std::nan("") : c.rho;
            }
        return rho;
      },
      py::arg("alphas"), py::arg("betas"), py::arg("taus"), py::arg("slope_s"),
      py::arg("poly_order") = 20, py::arg("threads") = 0,
      "Spectral radius per cell indexed [tau, beta, alpha]; NaN marks failed cells.");

  py::class_<IqrEstimator>(m, "IqrEstimator")
      .def(py::init<double, double>(), py::arg("lam"), py::arg("delta"))
      .def(
          "update",
          [](IqrEstimator& e, const Eigen::Vector3d& x, double y) {
            return e.update(RegressorSample{x, y, 0});
          },
          py::arg("x"), py::arg("y"))
      .def(
          "prior_error",
          [](const IqrEstimator& e, const Eigen::Vector3d& x, double y) {
            return e.prior_error(RegressorSample{x, y, 0});
          },
          py::arg("x"), py::arg("y"))
      .def_property_readonly("params", [](const IqrEstimator& e) { return Eigen::Vector3d(e.params()); })
      .def_property_readonly("covariance", &IqrEstimator::covariance)
      .def_property_readonly("samples_seen", &IqrEstimator::samples_seen);

  m.def(
      "batch_ls",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
        if (a.cols() != 3) throw DataError("batch_ls expects three columns");
        return batch_ls(a, b);
      },
      py::arg("a"), py::arg("b"));

  py::class_<BankConfig>(m, "BankConfig")
      .def(py::init<>())
      .def_readwrite("d_min", &BankConfig::d_min)
      .def_readwrite("d_max", &BankConfig::d_max)
      .def_readwrite("lam", &BankConfig::lambda)
      .def_readwrite("delta", &BankConfig::delta)
      .def_readwrite("eta_learn", &BankConfig::eta_learn)
      .def_readwrite("warmup", &BankConfig::warmup)
      .def_readwrite("scale", &BankConfig::scale);

  m.def(
      "identify",
      [](py::dict traj, double dt, const BankConfig& cfg, std::optional<Eigen::Vector3d> truth) {
        StudyOptions opts;
        opts.truth = truth;
        const auto r = identify_trajectory(trajectory_from(traj, dt), cfg, opts);
        py::dict out;
        out["final_delay"] = r.final_delay;
        out["final_params"] = Eigen::Vector3d(r.final_params);
        out["terminal_error"] = r.terminal_error;
        out["prediction_rmse"] = r.prediction_rmse;
        out["warmup_step"] = r.warmup_step;
        out["convergence_step"] = r.convergence_step;
        std::vector<double> d_star;
        for (const auto& s : r.steps) d_star.push_back(s.d_star);
        out["d_star"] = to_array(d_star);
        return out;
      },
      py::arg("trajectory"), py::arg("dt"), py::arg("config") = BankConfig{},
      py::arg("truth") = py::none(),
      "Runs the delay bank over a trajectory dict (dx, v_ego, dv, a_ego columns).");

  m.def(
      "inject_noise",
      [](std::vector<double> s, double snr_db, std::uint64_t seed) {
        return to_array(inject_noise(s, snr_db, seed));
      },
      py::arg("signal"), py::arg("snr_db"), py::arg("seed") = 1);
  m.def(
      "measure_snr",
      [](std::vector<double> clean, std::vector<double> noisy) { return measure_snr(clean, noisy); },
      py::arg("clean"), py::arg("noisy"));
  m.def(
      "rmse", [](std::vector<double> p, std::vector<double> a) { return rmse(p, a); },
      py::arg("predicted"), py::arg("actual"));
}
