#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "msdc/config.hpp"
#include "msdc/csv.hpp"
#include "msdc/error.hpp"
#include "msdc/run_setup.hpp"
#include "msdc/simulation.hpp"
#include "msdc/trajectory.hpp"

using namespace msdc;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return RunConfig::parse(in, "test.ini");
}

template <typename Fn>
std::string error_text(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

const char* kModel =
    "[model]\nmass_kg = 1000\nstiffness = 100\ndamping = 500\nslope_s = 5\ndelay_tau = 0.5\n"
    "v_low = 2\nv_high = 30\nx0_min = 10\nx0_max = 150\n";

}  // namespace

TEST(Config, SectionsCommentsAndTypes) {
  const auto cfg = parse("# header\n[noise]\nsnr_db = 30, 15 ,5 ; trailing\nseed = 7\n\n[simulation]\ndt=0.05\n");
  EXPECT_TRUE(cfg.has_section("noise"));
  EXPECT_FALSE(cfg.has_section("model"));
  EXPECT_EQ(cfg.section("noise").get_double_list("snr_db"), (std::vector<double>{30, 15, 5}));
  EXPECT_EQ(cfg.section("noise").get_int("seed"), 7);
  EXPECT_DOUBLE_EQ(cfg.section("simulation").get_double("dt"), 0.05);
  EXPECT_DOUBLE_EQ(cfg.section("simulation").get_double_or("horizon", 50.0), 50.0);
  EXPECT_TRUE(cfg.section_or_empty("stability").entries().empty());
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_text([] { parse("[model]\nmass_kg = 1\nmass_kg = 2\n"); }).find("test.ini:3"), std::string::npos);
  EXPECT_NE(error_text([] { parse("[bogus]\n"); }).find("test.ini:1"), std::string::npos);
  EXPECT_NE(error_text([] { parse("[model]\n[model]\n"); }).find("test.ini:2"), std::string::npos);
  EXPECT_NE(error_text([] { parse("orphan = 1\n"); }).find("test.ini:1"), std::string::npos);
  EXPECT_NE(error_text([] { parse("[model]\njust text\n"); }).find("test.ini:2"), std::string::npos);
  const auto cfg = parse("[simulation]\n\ndt = fast\n");
  EXPECT_NE(error_text([&] { cfg.section("simulation").get_double("dt"); }).find("test.ini:3"), std::string::npos);
  EXPECT_THROW(cfg.section("model"), ConfigError);
}

TEST(Config, LoadFromFileRecordsBaseDir) {
  const fs::path dir = fs::temp_directory_path() / "msdc_test_io";
  fs::create_directories(dir);
  const fs::path file = dir / "run.ini";
  std::ofstream(file) << kModel;
  const auto cfg = RunConfig::load(file);
  EXPECT_EQ(cfg.base_dir(), dir);
  EXPECT_THROW(RunConfig::load(dir / "missing.ini"), ConfigError);
}

TEST(RunSetup, SimulationDefaultsMatchScenario) {
  const auto setup = simulation_from_config(parse(kModel));
  EXPECT_EQ(setup.integrator, Integrator::Euler);
  EXPECT_DOUBLE_EQ(setup.scenario.horizon, 50.0);
  EXPECT_DOUBLE_EQ(setup.scenario.v0, 5.0);
  EXPECT_EQ(simulate(setup).size(), 501u);
}

TEST(RunSetup, RejectsUnknownKeysAndMissingFiles) {
  EXPECT_THROW(simulation_from_config(parse(std::string(kModel) + "[simulation]\nhorizn = 3\n")), ConfigError);
  const auto text = std::string(kModel) + "[simulation]\nlead = samples\nlead_file = /nonexistent/lead.csv\n";
  EXPECT_NE(error_text([&] { simulation_from_config(parse(text)); }).find("lead_file"), std::string::npos);
  EXPECT_THROW(simulation_from_config(parse("[simulation]\nhorizon = 3\n")), ConfigError);
}

TEST(RunSetup, StabilityDefaultsAreTheFullGrid) {
  const auto s = stability_from_config(parse(""));
  EXPECT_EQ(s.alpha_values.size(), 100u);
  EXPECT_EQ(s.beta_values.size(), 100u);
  EXPECT_EQ(s.tau_values.size(), 6u);
  EXPECT_DOUBLE_EQ(s.alpha_values.front(), 0.01);
  EXPECT_DOUBLE_EQ(s.beta_values.back(), 8.0);
  EXPECT_DOUBLE_EQ(s.tau_values.back(), 2.0);
  EXPECT_EQ(s.sem.poly_order, 20);
}

TEST(RunSetup, IdentificationKeys) {
  const auto s = identification_from_config(
      parse("[identification]\nd_min = 3\nd_max = 7\nlambda = 0.9\nscale_dx = 0.025\ntarget = speed_difference\n"));
  EXPECT_EQ(s.bank.d_min, 3);
  EXPECT_EQ(s.bank.d_max, 7);
  EXPECT_DOUBLE_EQ(s.bank.lambda, 0.9);
  EXPECT_DOUBLE_EQ(s.bank.scale(0), 0.025);
  EXPECT_EQ(s.bank.target, TargetSignal::SpeedDifference);
  EXPECT_THROW(identification_from_config(parse("[identification]\nd_min = 8\nd_max = 3\n")), ConfigError);
}

TEST(Csv, FormatNumberRoundTripsExactly) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  int tested = 0;
  while (tested < 5000) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    EXPECT_EQ(csv::parse_number(csv::format_number(v), "x"), v);
    ++tested;
  }
  EXPECT_EQ(csv::format_number(0.1), "0.10000000000000001");
}

TEST(Csv, ParseErrors) {
  EXPECT_THROW(csv::parse_number("1.5x", "where"), DataError);
  EXPECT_THROW(csv::parse_number("", "where"), DataError);
  std::istringstream ragged("a,b\n1,2\n3\n");
  EXPECT_NE(error_text([&] { csv::read_numeric(ragged, "r.csv"); }).find("r.csv:3"), std::string::npos);
}

TEST(TrajectoryCsv, ByteIdenticalRoundTrip) {
  const auto t = simulate_euler(CFParams::table1(), LeadProfile::scenario_default(), {20.0, 5.0}, 50.0, 0.1,
                                Mode::Nonlinear);
  const std::string first = trajectory_to_csv(t);
  std::istringstream in(first);
  const auto back = read_trajectory_csv(in, "mem");
  EXPECT_EQ(back.dx, t.dx);
  EXPECT_EQ(back.a_ego, t.a_ego);
  EXPECT_EQ(trajectory_to_csv(back), first);
  EXPECT_EQ(first.substr(0, first.find('\n')), kTrajectoryHeader);
}

TEST(TrajectoryCsv, RejectsBadTimeAxis) {
  std::istringstream uneven(std::string(kTrajectoryHeader) + "\n0,1,1,1,1,1\n0.1,1,1,1,1,1\n0.3,1,1,1,1,1\n");
  EXPECT_THROW(read_trajectory_csv(uneven), DataError);
  std::istringstream wrong_header("t,dx\n0,1\n");
  EXPECT_THROW(read_trajectory_csv(wrong_header), DataError);
}

TEST(TrajectoryCsv, EmptyBodyGivesEmptyTrajectory) {
  std::istringstream in(std::string(kTrajectoryHeader) + "\n");
  EXPECT_TRUE(read_trajectory_csv(in).empty());
}
