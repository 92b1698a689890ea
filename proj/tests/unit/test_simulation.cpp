#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "msdc/error.hpp"
#include "msdc/simulation.hpp"

using namespace msdc;

namespace {

// Straight transcription of the Euler recurrences, used as the reference.
struct EulerRef {
  std::vector<double> dx, v;
};

EulerRef euler_reference(const CFParams& p, const LeadProfile& lead, CFState x0, double horizon,
                         double dt) {
  const long d = std::lround(p.delay_tau / dt);
  const long n = std::lround(horizon / dt) + 1;
  EulerRef r;
  r.dx.push_back(x0.x1);
  r.v.push_back(x0.x2);
  for (long k = 1; k < n; ++k) {
    const long j = std::max(0L, k - d);
    const double dvj = lead.speed(j * dt) - r.v[j];
    const double a = (p.stiffness / p.mass_kg) * (r.dx[j] - p.slope_s * r.v[j]) +
                     (p.damping / p.mass_kg) * dvj;
    const double dv_prev = lead.speed((k - 1) * dt) - r.v[k - 1];
    r.v.push_back(r.v[k - 1] + dt * a);
    r.dx.push_back(r.dx[k - 1] + dt * dv_prev);
  }
  return r;
}

double sup_gap(const Trajectory& coarse, const Trajectory& fine) {
  const long ratio = std::lround(coarse.dt / fine.dt);
  double gap = 0.0;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    gap = std::max(gap, std::abs(coarse.v_ego[k] - fine.v_ego[k * ratio]));
  }
  return gap;
}

}  // namespace

TEST(Euler, Table1RowCountAndFirstStep) {
  const auto p = CFParams::table1();
  const auto t = simulate_euler(p, LeadProfile::scenario_default(), {20.0, 5.0}, 50.0, 0.1, Mode::Linear);
  ASSERT_EQ(t.size(), 501u);
  EXPECT_EQ(t.status, RunStatus::Ok);
  // a(0) = 0.1 (20 - 25) + 0.5 (10 - 5) = 2.
  EXPECT_NEAR(t.a_ego[0], 2.0, 1e-12);
  EXPECT_NEAR(t.v_ego[1], 5.2, 1e-12);
  EXPECT_NEAR(t.dx[1], 20.5, 1e-12);
  EXPECT_NEAR(t.time(500), 50.0, 1e-9);
}

TEST(Euler, MatchesIndependentRecurrence) {
  const auto p = CFParams::table1();
  const auto lead = LeadProfile::scenario_default();
  const auto t = simulate_euler(p, lead, {20.0, 5.0}, 50.0, 0.1, Mode::Linear);
  const auto r = euler_reference(p, lead, {20.0, 5.0}, 50.0, 0.1);
  ASSERT_EQ(r.v.size(), t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_NEAR(t.v_ego[k], r.v[k], 1e-11) << k;
    EXPECT_NEAR(t.dx[k], r.dx[k], 1e-10) << k;
  }
}

TEST(Euler, AccelerationColumnIsBackwardDifference) {
  const auto t = simulate_euler(CFParams::table1(), LeadProfile::scenario_default(), {20.0, 5.0}, 10.0,
                                0.1, Mode::Nonlinear);
  for (std::size_t k = 1; k < t.size(); ++k) {
    EXPECT_NEAR(t.a_ego[k], (t.v_ego[k] - t.v_ego[k - 1]) / 0.1, 1e-9);
    EXPECT_NEAR(t.dv[k], t.u_lead[k] - t.v_ego[k], 1e-12);
  }
}

TEST(Euler, ZeroDelayUsesLatestState) {
  auto p = CFParams::table1();
  p.delay_tau = 0.0;
  const auto t = simulate_euler(p, LeadProfile::constant(10.0), {20.0, 5.0}, 1.0, 0.1, Mode::Linear);
  ASSERT_EQ(t.size(), 11u);
  EXPECT_NEAR(t.v_ego[1], 5.0 + 0.1 * 2.0, 1e-12);
}

TEST(Euler, RejectsBadArguments) {
  const auto p = CFParams::table1();
  const auto lead = LeadProfile::constant(10.0);
  EXPECT_THROW(simulate_euler(p, lead, {20.0, 5.0}, 0.0, 0.1, Mode::Linear), ConfigError);
  EXPECT_THROW(simulate_euler(p, lead, {20.0, 5.0}, 10.0, -0.1, Mode::Linear), ConfigError);
}

TEST(Dde, SteadyHistoryStaysPut) {
  const ReducedParams r{1.0, 2.0, 5.0};
  const auto t = simulate_dde(r, 0.2, LeadProfile::constant(10.0),
                              History::perturbed_steady_state(10.0, r, 0.0), 20.0, 0.01);
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_NEAR(t.dx[k], 50.0, 1e-9);
    EXPECT_NEAR(t.v_ego[k], 10.0, 1e-9);
  }
}

TEST(Dde, FirstIntervalMatchesPolynomialSolution) {
  // On [0, tau] the delayed argument is the constant history, so
  //   v(t) = v_h + a_h t,   dx(t) = dx_h + (u - v_h) t - a_h t^2 / 2.
  const auto p = CFParams::table1();
  const double u = 12.0;
  const CFState h{30.0, 8.0};
  const double a_h = acceleration(h.x1, h.x2, u - h.x2, p, Mode::Linear);
  const auto t = simulate_dde(p, LeadProfile::constant(u), History::constant(h), 1.0, 0.05, Mode::Linear);
  for (std::size_t k = 0; k * 0.05 <= p.delay_tau + 1e-12; ++k) {
    const double tt = t.time(k);
    EXPECT_NEAR(t.v_ego[k], h.x2 + a_h * tt, 1e-12) << tt;
    EXPECT_NEAR(t.dx[k], h.x1 + (u - h.x2) * tt - 0.5 * a_h * tt * tt, 1e-12) << tt;
    EXPECT_NEAR(t.a_ego[k], a_h, 1e-9) << tt;
  }
}

TEST(Dde, StableCaseReturnsToEquilibrium) {
  const ReducedParams r{1.0, 2.0, 5.0};
  const auto t = simulate_dde(r, 0.2, LeadProfile::constant(10.0),
                              History::perturbed_steady_state(10.0, r, 0.1), 50.0, 0.01);
  ASSERT_EQ(t.status, RunStatus::Ok);
  EXPECT_NEAR(t.v_ego.back(), 10.0, 0.01 * 10.0);
  EXPECT_NEAR(t.dx.back(), 50.0, 0.01 * 50.0);
}

TEST(Dde, UnstableCaseDivergesAndTruncates) {
  const ReducedParams r{1.6, 2.0, 5.0};
  const auto t = simulate_dde(r, 0.2, LeadProfile::constant(10.0),
                              History::perturbed_steady_state(10.0, r, 0.1), 500.0, 0.01);
  EXPECT_EQ(t.status, RunStatus::Diverged);
  EXPECT_GT(t.diverged_at, 0.0);
  EXPECT_LT(t.size(), 50001u);
  for (double v : t.v_ego) EXPECT_LE(std::abs(v), kDivergenceLimit);
}

TEST(Dde, ZeroDelayRunsAsOde) {
  auto p = CFParams::table1();
  p.delay_tau = 0.0;
  const auto t = simulate_dde(p, LeadProfile::constant(10.0), History::constant({20.0, 5.0}), 5.0, 0.1,
                              Mode::Linear);
  EXPECT_EQ(t.size(), 51u);
  EXPECT_EQ(t.status, RunStatus::Ok);
}

TEST(Dde, FourthOrderInStepSize) {
  const auto p = CFParams::table1();
  const auto lead = LeadProfile::scenario_default();
  const auto hist = History::constant({20.0, 5.0});
  const auto ref = simulate_dde(p, lead, hist, 10.0, 0.0025, Mode::Linear);
  const auto c1 = simulate_dde(p, lead, hist, 10.0, 0.1, Mode::Linear);
  const auto c2 = simulate_dde(p, lead, hist, 10.0, 0.05, Mode::Linear);
  const double e1 = sup_gap(c1, ref);
  const double e2 = sup_gap(c2, ref);
  EXPECT_GT(e1 / e2, 6.0) << e1 << " " << e2;
}

TEST(Dde, RowsOnRequestedGridWhenInternalStepDiffers) {
  // tau = 0.5 and h = 0.3 give an internal step of 0.25; rows stay at 0.3 spacing.
  const auto t = simulate_dde(CFParams::table1(), LeadProfile::constant(10.0), History::constant({20.0, 5.0}),
                              3.0, 0.3, Mode::Linear);
  EXPECT_EQ(t.size(), 11u);
  EXPECT_DOUBLE_EQ(t.dt, 0.3);
}

TEST(EulerVsDde, GapShrinksLinearlyInStep) {
  const auto p = CFParams::table1();
  const auto lead = LeadProfile::scenario_default();
  const CFState x0{20.0, 5.0};
  const auto fine = simulate_dde(p, lead, History::constant(x0), 50.0, 0.0025, Mode::Linear);
  std::vector<double> gaps;
  for (double dt : {0.05, 0.025, 0.0125}) {
    gaps.push_back(sup_gap(simulate_euler(p, lead, x0, 50.0, dt, Mode::Linear), fine));
  }
  EXPECT_GT(gaps[0], gaps[1]);
  EXPECT_GT(gaps[1], gaps[2]);
  for (int i = 0; i < 2; ++i) {
    const double ratio = gaps[i] / gaps[i + 1];
    EXPECT_GT(ratio, 1.6) << ratio;
    EXPECT_LT(ratio, 2.5) << ratio;
  }
}

TEST(LeadProfile, Forms) {
  EXPECT_DOUBLE_EQ(LeadProfile::constant(7.0).speed(3.0), 7.0);
  const auto e = LeadProfile::scenario_default();
  EXPECT_DOUBLE_EQ(e.speed(0.0), 10.0);
  EXPECT_NEAR(e.speed(20.0), 15.0 - 5.0 * std::exp(-1.0), 1e-12);
  const auto pw = LeadProfile::piecewise_linear({0.0, 1.0, 3.0}, {0.0, 2.0, 2.0});
  EXPECT_DOUBLE_EQ(pw.speed(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(pw.speed(0.5), 1.0);
  EXPECT_DOUBLE_EQ(pw.speed(10.0), 2.0);
  EXPECT_THROW(LeadProfile::piecewise_linear({0.0, 0.0}, {1.0, 2.0}), Error);
  EXPECT_THROW(LeadProfile::piecewise_linear({0.0}, {1.0, 2.0}), Error);
}
