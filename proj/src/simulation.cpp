#include "msdc/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "msdc/error.hpp"

namespace msdc {
namespace {

using Vec2 = std::array<double, 2>;

Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }

bool diverged(const Vec2& x) {
  return !std::isfinite(x[0]) || !std::isfinite(x[1]) || std::abs(x[0]) > kDivergenceLimit ||
         std::abs(x[1]) > kDivergenceLimit;
}

struct GridPoint {
  Vec2 x;
  Vec2 f;
};

// Cubic Hermite on [0, 1] with end values and slopes (slopes scaled by h).
Vec2 hermite(const GridPoint& a, const GridPoint& b, double h, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * a.x + (h10 * h) * a.f + h01 * b.x + (h11 * h) * b.f;
}

Vec2 hermite_slope(const GridPoint& a, const GridPoint& b, double h, double s) {
  const double s2 = s * s;
  const double d00 = 6 * s2 - 6 * s;
  const double d10 = 3 * s2 - 4 * s + 1;
  const double d01 = -6 * s2 + 6 * s;
  const double d11 = 3 * s2 - 2 * s;
  return (d00 / h) * a.x + d10 * a.f + (d01 / h) * b.x + d11 * b.f;
}

class Rhs {
 public:
  Rhs(const CFParams& p, const LeadProfile& lead, Mode mode) : p_(p), lead_(lead), mode_(mode) {}

  Vec2 operator()(double t, const Vec2& x, const Vec2& x_delayed) const {
    // On the history interval the lead speed is held at u(0), like the state.
    const double u_delayed = lead_.speed(std::max(t - p_.delay_tau, 0.0));
    return {lead_.speed(t) - x[1],
            acceleration(x_delayed[0], x_delayed[1], u_delayed - x_delayed[1], p_, mode_)};
  }

 private:
  const CFParams& p_;
  const LeadProfile& lead_;
  Mode mode_;
};

// Ring buffer over the last `capacity` grid points, addressed by absolute step index.
class GridRing {
 public:
  explicit GridRing(std::size_t capacity) : buf_(capacity) {}

  void store(long n, const GridPoint& g) { buf_[static_cast<std::size_t>(n) % buf_.size()] = g; }
  const GridPoint& at(long n) const { return buf_[static_cast<std::size_t>(n) % buf_.size()]; }

 private:
  std::vector<GridPoint> buf_;
};

class OutputSampler {
 public:
  OutputSampler(Trajectory& out, const LeadProfile& lead, double dt, long rows)
      : out_(out), lead_(lead), dt_(dt), rows_(rows) {}

  bool finished() const { return next_ >= rows_; }

  // Emits every output row whose time falls in (t_a, t_a + h].
  void emit_interval(const GridPoint& a, const GridPoint& b, double t_a, double h) {
    while (next_ < rows_) {
      const double t = static_cast<double>(next_) * dt_;
      if (t > t_a + h * (1.0 + 1e-12)) break;
      const double s = std::clamp((t - t_a) / h, 0.0, 1.0);
      emit(t, hermite(a, b, h, s), hermite_slope(a, b, h, s));
    }
  }

  void emit(double t, const Vec2& x, const Vec2& f) {
    const double u = lead_.speed(t);
    out_.push_back(x[0], x[1], u - x[1], f[1], u);
    ++next_;
  }

 private:
  Trajectory& out_;
  const LeadProfile& lead_;
  double dt_;
  long rows_;
  long next_ = 0;
};

long output_rows(double horizon, double dt) {
  return static_cast<long>(std::llround(horizon / dt)) + 1;
}

void check_run_args(double horizon, double step) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError(fmt::format("simulation horizon must be > 0, got {}", horizon));
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ConfigError(fmt::format("simulation step must be > 0, got {}", step));
  }
}

}  // namespace

History History::perturbed_steady_state(double u, const ReducedParams& r, double eps) {
  const CFState ss = steady_state(u, r);
  return History({ss.x1 * (1.0 + eps), ss.x2 * (1.0 + eps)});
}

Trajectory simulate_dde(const CFParams& p, const LeadProfile& lead, const History& hist,
                        double horizon, double h, Mode mode) {
  p.validate();
  check_run_args(horizon, h);

  const double tau = p.delay_tau;
  const long m = tau > 0.0 ? std::max(1L, static_cast<long>(std::llround(tau / h))) : 0;
  const double step = tau > 0.0 ? tau / static_cast<double>(m) : h;

  Trajectory out;
  out.dt = h;
  const long rows = output_rows(horizon, h);
  out.reserve(static_cast<std::size_t>(rows));

  const Rhs rhs(p, lead, mode);
  const CFState s0 = hist.at(0.0);
  const Vec2 x0{s0.x1, s0.x2};
  auto history_point = [&](double t) {
    const CFState s = hist.at(t);
    return GridPoint{{s.x1, s.x2}, {0.0, 0.0}};
  };

  // Grid value (and slope) of the solution at step index j, history for j <= 0.
  GridRing ring(static_cast<std::size_t>(m + 2));
  auto grid = [&](long j) -> GridPoint {
    if (j < 0) return history_point(static_cast<double>(j) * step);
    return ring.at(j);
  };
  auto delayed_at_node = [&](long j) -> Vec2 {
    return j <= 0 ? history_point(static_cast<double>(j) * step).x : ring.at(j).x;
  };
  auto delayed_at_mid = [&](long j) -> Vec2 {
    // Midpoint of [j, j + 1] on the grid.
    if (j + 1 <= 0) return history_point((static_cast<double>(j) + 0.5) * step).x;
    return hermite(grid(j), grid(j + 1), step, 0.5);
  };

  GridPoint g0{x0, rhs(0.0, x0, tau > 0.0 ? delayed_at_node(-m) : x0)};
  ring.store(0, g0);
  OutputSampler sampler(out, lead, h, rows);
  sampler.emit(0.0, g0.x, g0.f);

  const long steps = static_cast<long>(std::ceil(horizon / step - 1e-9));
  GridPoint prev = g0;
  for (long n = 0; n < steps && !sampler.finished(); ++n) {
    const double t = static_cast<double>(n) * step;
    const Vec2& x = prev.x;
    Vec2 k1, k2, k3, k4;
    if (tau > 0.0) {
      const Vec2 dm = delayed_at_mid(n - m);
      const Vec2 d1 = delayed_at_node(n - m + 1);
      k1 = prev.f;
      k2 = rhs(t + 0.5 * step, x + (0.5 * step) * k1, dm);
      k3 = rhs(t + 0.5 * step, x + (0.5 * step) * k2, dm);
      k4 = rhs(t + step, x + step * k3, d1);
    } else {
      auto f = [&](double tt, const Vec2& xx) { return rhs(tt, xx, xx); };
      k1 = prev.f;
      k2 = f(t + 0.5 * step, x + (0.5 * step) * k1);
      k3 = f(t + 0.5 * step, x + (0.5 * step) * k2);
      k4 = f(t + step, x + step * k3);
    }
    const Vec2 x_next = x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t_next = t + step;
    if (diverged(x_next)) {
      out.status = RunStatus::Diverged;
      out.diverged_at = t_next;
      return out;
    }
    const Vec2 f_next =
        tau > 0.0 ? rhs(t_next, x_next, delayed_at_node(n + 1 - m)) : rhs(t_next, x_next, x_next);
    const GridPoint next{x_next, f_next};
    ring.store(n + 1, next);
    sampler.emit_interval(prev, next, t, step);
    prev = next;
  }
  return out;
}

Trajectory simulate_dde(const ReducedParams& r, double tau, const LeadProfile& lead,
                        const History& hist, double horizon, double h) {
  r.validate();
  return simulate_dde(from_reduced(r, tau), lead, hist, horizon, h, Mode::Linear);
}

Trajectory simulate_euler(const CFParams& p, const LeadProfile& lead, const CFState& x0,
                          double horizon, double dt, Mode mode) {
  p.validate();
  check_run_args(horizon, dt);

  const long d = static_cast<long>(std::llround(p.delay_tau / dt));
  const long rows = output_rows(horizon, dt);

  Trajectory out;
  out.dt = dt;
  out.reserve(static_cast<std::size_t>(rows));

  const double u0 = lead.speed(0.0);
  auto accel_from = [&](long j) {
    const std::size_t i = static_cast<std::size_t>(std::max(0L, j));
    return acceleration(out.dx[i], out.v_ego[i], out.dv[i], p, mode);
  };

  out.push_back(x0.x1, x0.x2, u0 - x0.x2, 0.0, u0);
  out.a_ego[0] = accel_from(-d);

  for (long k = 1; k < rows; ++k) {
    const std::size_t prev = static_cast<std::size_t>(k - 1);
    // d = 0 (tau < dt / 2) reads the latest available state.
    const double v = out.v_ego[prev] + dt * accel_from(std::min(k - d, k - 1));
    const double dx = out.dx[prev] + dt * out.dv[prev];
    if (!std::isfinite(v) || !std::isfinite(dx) || std::abs(v) > kDivergenceLimit ||
        std::abs(dx) > kDivergenceLimit) {
      out.status = RunStatus::Diverged;
      out.diverged_at = out.time(static_cast<std::size_t>(k));
      return out;
    }
    const double u = lead.speed(out.time(static_cast<std::size_t>(k)));
    out.push_back(dx, v, u - v, (v - out.v_ego[prev]) / dt, u);
  }
  return out;
}

}  // namespace msdc
