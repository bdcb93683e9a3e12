#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "broad/simharness.hpp"

namespace broad {
namespace {

// Composite Simpson rule on the exponential density restricted to [lo, hi].
double simpson_truncated_mean(double mean, double lo, double hi, int panels = 200000) {
  const double h = (hi - lo) / panels;
  double num = 0, den = 0;
  for (int k = 0; k <= panels; ++k) {
    const double x = lo + k * h;
    const double w = (k == 0 || k == panels) ? 1 : (k % 2 ? 4 : 2);
    const double pdf = std::exp(-x / mean);
    num += w * x * pdf;
    den += w * pdf;
  }
  return num / den;
}

ScenarioParams params(std::size_t users, double delta_km) {
  ScenarioParams p;
  p.users = users;
  p.delta_km = delta_km;
  return p;
}

GaConfig ga_seed(std::uint64_t s) {
  GaConfig g;
  g.rng_seed = s;
  return g;
}

TEST(Scenario, EmptyWhenNoUsers) {
  const auto s = generate_scenario(params(0, 10), 1);
  EXPECT_TRUE(s.network.users.empty());
  EXPECT_EQ(s.network.mbs.x, 10000);
  EXPECT_EQ(s.network.mbs.y, 0);
  EXPECT_EQ(s.network.mbs.h, 20);
}

TEST(Scenario, UsersInsidePoiAndRatesTruncated) {
  const auto p = params(10000, 10);
  const auto s = generate_scenario(p, 7);
  double lo = 1e300, hi = 0, sum = 0;
  for (const auto& u : s.network.users) {
    EXPECT_GE(u.x, -250);
    EXPECT_LE(u.x, 250);
    EXPECT_GE(u.y, -250);
    EXPECT_LE(u.y, 250);
    lo = std::min(lo, u.phi);
    hi = std::max(hi, u.phi);
    sum += u.phi;
  }
  EXPECT_GE(lo, 5e5);
  EXPECT_LE(hi, 5e8);
  const double analytic = simpson_truncated_mean(5e6, 5e5, 5e8);
  EXPECT_NEAR(truncated_exponential_mean(5e6, 5e5, 5e8), analytic, 1e-6 * analytic);
  EXPECT_NEAR(sum / 1e4, analytic, 0.05 * analytic);
}

TEST(Scenario, DeterministicPerSeed) {
  const auto a = generate_scenario(params(50, 10), 3);
  const auto b = generate_scenario(params(50, 10), 3);
  const auto c = generate_scenario(params(50, 10), 4);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(a.network.users[i].x, b.network.users[i].x);
    EXPECT_EQ(a.network.users[i].phi, b.network.users[i].phi);
  }
  EXPECT_NE(a.network.users[0].x, c.network.users[0].x);
}

TEST(Scenario, InvalidParametersRejected) {
  auto p = params(5, 10);
  p.poi_width_m = 0;
  EXPECT_THROW(generate_scenario(p, 1), std::invalid_argument);
}

TEST(Baselines, ZeroUsers) {
  const auto s = generate_scenario(params(0, 10), 1);
  EXPECT_EQ(baseline_center_fixed(s, {}).satisfied_count, 0u);
  EXPECT_EQ(baseline_grid_search(s, {}, 3).satisfied_count, 0u);
}

TEST(Baselines, CenterFixedStaysAtCenterAndValidates) {
  const auto s = generate_scenario(params(60, 8), 2);
  const auto plan = baseline_center_fixed(s, ga_seed(2));
  EXPECT_EQ(plan.dbs_position.x, 0);
  EXPECT_EQ(plan.dbs_position.y, 0);
  EXPECT_TRUE(validate_plan(plan, s.network).empty());
}

TEST(Baselines, SingleBlockGridEqualsCenterFixed) {
  const auto s = generate_scenario(params(40, 10), 5);
  const auto c = baseline_center_fixed(s, ga_seed(5), 11);
  const auto g = baseline_grid_search(s, ga_seed(5), 1, 11);
  EXPECT_EQ(g.satisfied_count, c.satisfied_count);
  EXPECT_EQ(g.dbs_position.h, c.dbs_position.h);
}

TEST(Baselines, GridDominatesEachCandidate) {
  const auto s = generate_scenario(params(15, 10), 6);
  const auto g = baseline_grid_search(s, ga_seed(6), 3, 4);
  EXPECT_TRUE(validate_plan(g, s.network).empty());
  for (int bx = 0; bx < 3; ++bx) {
    for (int by = 0; by < 3; ++by) {
      for (int k = 0; k < 4; ++k) {
        const Position3D p{-250 + (bx + 0.5) * 500.0 / 3, -250 + (by + 0.5) * 500.0 / 3, 50 + 150.0 * k};
        EXPECT_GE(g.satisfied_count, solve_access_at(s.network, p, ga_seed(6)).satisfied_count);
      }
    }
  }
  EXPECT_THROW(baseline_grid_search(s, {}, 0), std::invalid_argument);
}

TEST(Baselines, ComparedWithBroad) {
  BroadOptions bo;
  {
    const auto s = generate_scenario(params(100, 5), 1);
    bo.ga.rng_seed = s.seed;
    const auto b = run_broad_on(s, bo);
    const auto c = baseline_center_fixed(s, ga_seed(s.seed));
    EXPECT_LE(std::abs(static_cast<double>(b.satisfied_count) - static_cast<double>(c.satisfied_count)),
              0.1 * static_cast<double>(b.satisfied_count));
  }
  {
    const auto s = generate_scenario(params(100, 20), 1);
    bo.ga.rng_seed = s.seed;
    EXPECT_LT(baseline_center_fixed(s, ga_seed(s.seed)).satisfied_count, run_broad_on(s, bo).satisfied_count);
  }
  {
    const auto s = generate_scenario(params(100, 15), 1);
    bo.ga.rng_seed = s.seed;
    EXPECT_LE(baseline_grid_search(s, ga_seed(s.seed), 5).satisfied_count, run_broad_on(s, bo).satisfied_count);
  }
}

TEST(Sweep, EmptyAlgorithmList) {
  SweepSpec spec;
  spec.values = {5};
  EXPECT_TRUE(run_sweep(spec, params(10, 5), {}).results.empty());
}

TEST(Sweep, OneOfEach) {
  SweepSpec spec;
  spec.values = {7};
  spec.trials_per_point = 1;
  spec.base_seed = 3;
  const auto out = run_sweep(spec, params(10, 5), {Algorithm::kBroad});
  ASSERT_EQ(out.results.size(), 1u);
  EXPECT_TRUE(out.failures.empty());
  EXPECT_EQ(out.results[0].seed, 3u);
  EXPECT_EQ(out.results[0].sweep_value, 7);
  EXPECT_EQ(out.results[0].algorithm, "broad");
}

TEST(Sweep, OrderedAndReproducibleAcrossThreadCounts) {
  SweepSpec spec;
  spec.values = {5, 12};
  spec.trials_per_point = 3;
  SweepOptions one, four;
  one.threads = 1;
  four.threads = 4;
  one.measure_runtime = four.measure_runtime = false;
  const std::vector<Algorithm> algos{Algorithm::kCenterFixed, Algorithm::kBroad};
  const auto a = run_sweep(spec, params(20, 5), algos, one);
  const auto b = run_sweep(spec, params(20, 5), algos, four);
  std::ostringstream ca, cb;
  emit_results(a.results, ResultFormat::kCsv, ca);
  emit_results(b.results, ResultFormat::kCsv, cb);
  EXPECT_EQ(ca.str(), cb.str());
  ASSERT_EQ(a.results.size(), 12u);
  EXPECT_EQ(a.results[0].algorithm, "center-fixed");
  EXPECT_EQ(a.results[6].algorithm, "broad");
  EXPECT_EQ(a.results[3].sweep_value, 12);
  EXPECT_EQ(a.results[4].trial, 1u);
  for (const auto& r : a.results) {
    EXPECT_LE(r.backhaul_utilization, 1 + 1e-9);
    EXPECT_LE(r.access_utilization, 1 + 1e-9);
    EXPECT_EQ(r.runtime_ms, 0);
  }
}

TEST(Sweep, VisibilityRewritesAttenuation) {
  const auto p = apply_sweep_value(params(1, 5), SweepVariable::kVisibilityKm, 2);
  EXPECT_FALSE(p.config.fso.fixed_attenuation_db_per_km.has_value());
  EXPECT_EQ(p.config.fso.visibility_km, 2);
  EXPECT_EQ(apply_sweep_value(params(1, 5), SweepVariable::kDeltaKm, 9).delta_km, 9);
}

TEST(Sweep, CountFallsWithDistance) {
  SweepSpec spec;
  spec.values = {5, 20};
  spec.trials_per_point = 4;
  SweepOptions o;
  o.measure_runtime = false;
  const auto out = run_sweep(spec, params(60, 5), {Algorithm::kBroad}, o);
  double near = 0, far = 0;
  for (const auto& r : out.results) (r.sweep_value == 5 ? near : far) += static_cast<double>(r.satisfied_count);
  EXPECT_GT(near, far);
}

TEST(Sweep, TrialFailuresAreRecorded) {
  SweepSpec spec;
  spec.values = {5};
  spec.trials_per_point = 2;
  auto p = params(5, 5);
  p.poi_width_m = -1;  // every scenario build throws
  const auto out = run_sweep(spec, p, {Algorithm::kBroad});
  EXPECT_TRUE(out.results.empty());
  EXPECT_EQ(out.failures.size(), 2u);
}

std::vector<TrialResult> fixture() {
  TrialResult a;
  a.algorithm = "broad";
  a.sweep_variable = "delta_km";
  a.sweep_value = 5;
  a.trial = 0;
  a.seed = 1;
  a.satisfied_count = 74;
  a.backhaul_utilization = 0.4127881234;
  a.access_utilization = 0.99;
  a.dbs_position = {-1.2120581, 3.5e-7, 127.04531};
  a.runtime_ms = 12.3456789;
  TrialResult b;
  b.algorithm = "center-fixed";
  b.sweep_variable = "visibility_km";
  b.sweep_value = 2.5;
  b.trial = 9;
  b.seed = 10;
  b.satisfied_count = 0;
  b.backhaul_utilization = 0;
  b.access_utilization = 0;
  b.dbs_position = {-0.0, 1234567.0, 500};
  b.runtime_ms = 0;
  return {a, b};
}

constexpr const char* kHeader =
    "algorithm,sweep_variable,sweep_value,trial,seed,satisfied_count,backhaul_util,access_util,dbs_x_m,dbs_y_m,"
    "dbs_h_m,runtime_ms\n";

TEST(Emit, HeaderOnlyWhenEmpty) {
  std::ostringstream os;
  emit_results({}, ResultFormat::kCsv, os);
  EXPECT_EQ(os.str(), kHeader);
}

TEST(Emit, GoldenCsv) {
  std::ostringstream os;
  emit_results(fixture(), ResultFormat::kCsv, os);
  EXPECT_EQ(os.str(), std::string(kHeader) +
                          "broad,delta_km,5,0,1,74,0.412788,0.99,-1.21206,3.5e-07,127.045,12.3457\n"
                          "center-fixed,visibility_km,2.5,9,10,0,0,0,0,1.23457e+06,500,0\n");
}

TEST(Emit, GoldenJsonLines) {
  std::ostringstream os;
  emit_results({fixture()[0]}, ResultFormat::kJsonLines, os);
  EXPECT_EQ(os.str(),
            "{\"algorithm\":\"broad\",\"sweep_variable\":\"delta_km\",\"sweep_value\":5.0,\"trial\":0,\"seed\":1,"
            "\"satisfied_count\":74,\"backhaul_util\":0.412788,\"access_util\":0.99,\"dbs_x_m\":-1.21206,"
            "\"dbs_y_m\":3.5e-07,\"dbs_h_m\":127.045,\"runtime_ms\":12.3457}\n");
}

void expect_six_digits(double a, double b) {
  if (a == 0) {
    EXPECT_EQ(b, 0);
    return;
  }
  EXPECT_NEAR(b, a, 5e-6 * std::abs(a));
}

TEST(Emit, RoundTripBothFormats) {
  for (auto fmt : {ResultFormat::kCsv, ResultFormat::kJsonLines}) {
    std::stringstream ss;
    emit_results(fixture(), fmt, ss);
    const auto back = parse_results(ss, fmt);
    const auto orig = fixture();
    ASSERT_EQ(back.size(), orig.size());
    for (std::size_t i = 0; i < orig.size(); ++i) {
      EXPECT_EQ(back[i].algorithm, orig[i].algorithm);
      EXPECT_EQ(back[i].sweep_variable, orig[i].sweep_variable);
      EXPECT_EQ(back[i].trial, orig[i].trial);
      EXPECT_EQ(back[i].seed, orig[i].seed);
      EXPECT_EQ(back[i].satisfied_count, orig[i].satisfied_count);
      expect_six_digits(orig[i].sweep_value, back[i].sweep_value);
      expect_six_digits(orig[i].backhaul_utilization, back[i].backhaul_utilization);
      expect_six_digits(orig[i].access_utilization, back[i].access_utilization);
      expect_six_digits(orig[i].dbs_position.x, back[i].dbs_position.x);
      expect_six_digits(orig[i].dbs_position.y, back[i].dbs_position.y);
      expect_six_digits(orig[i].dbs_position.h, back[i].dbs_position.h);
      expect_six_digits(orig[i].runtime_ms, back[i].runtime_ms);
    }
  }
}

TEST(Emit, UnwritableDestination) {
  EXPECT_THROW(emit_results(fixture(), ResultFormat::kCsv, std::string("/nonexistent-dir/x.csv")),
               std::runtime_error);
}

TEST(Emit, FormatNames) {
  EXPECT_EQ(parse_result_format("csv"), ResultFormat::kCsv);
  EXPECT_EQ(parse_result_format("json-lines"), ResultFormat::kJsonLines);
  EXPECT_FALSE(parse_result_format("xml").has_value());
}

TEST(Config, KeyValuesApplied) {
  std::istringstream in(
      "# scenario\n"
      "users = 12\n"
      "delta_km = 7.5   # km\n"
      "B = 1e7\n"
      "divergence = 1e-3\n"
      "gamma = visibility\n"
      "visibility = 2\n"
      "h_max = 300\n");
  ScenarioParams p;
  apply_key_values(read_key_values(in), p);
  EXPECT_EQ(p.users, 12u);
  EXPECT_EQ(p.delta_km, 7.5);
  EXPECT_EQ(p.config.access.bandwidth_hz, 1e7);
  EXPECT_EQ(p.config.fso.divergence_rad, 1e-3);
  EXPECT_FALSE(p.config.fso.fixed_attenuation_db_per_km.has_value());
  EXPECT_EQ(p.config.fso.visibility_km, 2);
  EXPECT_EQ(p.config.altitude.h_max, 300);
}

TEST(Config, BadInputRejected) {
  ScenarioParams p;
  std::istringstream unknown("colour = red\n");
  EXPECT_THROW(apply_key_values(read_key_values(unknown), p), std::invalid_argument);
  std::istringstream malformed("B = twenty\n");
  EXPECT_THROW(apply_key_values(read_key_values(malformed), p), std::invalid_argument);
  std::istringstream no_equals("users 5\n");
  EXPECT_THROW(read_key_values(no_equals), std::invalid_argument);
  std::istringstream bounds("h_min = 400\nh_max = 100\n");
  EXPECT_THROW(apply_key_values(read_key_values(bounds), p), std::invalid_argument);
}

TEST(PlanFile, RoundTripValidates) {
  const auto s = generate_scenario(params(25, 9), 4);
  BroadOptions bo;
  const auto plan = run_broad_on(s, bo);
  std::stringstream ss;
  write_plan_file(ss, s.network, plan);
  Network net;
  BroadPlan back;
  read_plan_file(ss, net, back);
  EXPECT_EQ(back.z, plan.z);
  EXPECT_EQ(back.satisfied_count, plan.satisfied_count);
  EXPECT_EQ(back.dbs_position.x, plan.dbs_position.x);
  EXPECT_EQ(back.per_user_bandwidth, plan.per_user_bandwidth);
  EXPECT_EQ(net.users.size(), 25u);
  EXPECT_EQ(net.users[3].phi, s.network.users[3].phi);
  EXPECT_EQ(net.config.fso.divergence_rad, s.network.config.fso.divergence_rad);
  EXPECT_TRUE(validate_plan(back, net).empty());

  // tampering with a grant is caught
  std::string text = ss.str();
  std::stringstream tampered;
  write_plan_file(tampered, s.network, plan);
  text = tampered.str();
  const auto pos = text.find("B = ");
  text.replace(pos, text.find('\n', pos) - pos, "B = 1000");
  std::istringstream in(text);
  read_plan_file(in, net, back);
  EXPECT_FALSE(validate_plan(back, net).empty());
}

}  // namespace
}  // namespace broad

namespace broad {
namespace {

TEST(SweepProperties, BroadNotWorseThanBaselinesPerTrial) {
  SweepSpec spec;
  spec.values = {5, 10, 15, 20};
  spec.trials_per_point = 2;
  SweepOptions o;
  o.measure_runtime = false;
  const auto out =
      run_sweep(spec, params(100, 5), {Algorithm::kBroad, Algorithm::kCenterFixed, Algorithm::kGridSearch}, o);
  ASSERT_TRUE(out.failures.empty());
  const std::size_t per = spec.values.size() * spec.trials_per_point;
  ASSERT_EQ(out.results.size(), 3 * per);
  for (std::size_t i = 0; i < per; ++i) {
    const auto& b = out.results[i];
    EXPECT_GE(b.satisfied_count + 1, out.results[per + i].satisfied_count) << "value " << b.sweep_value;
    EXPECT_GE(b.satisfied_count + 1, out.results[2 * per + i].satisfied_count) << "value " << b.sweep_value;
  }
}

TEST(SweepProperties, OffsetGrowsWithDistanceBeyondTenKilometers) {
  SweepSpec spec;
  spec.values = {10, 15, 20};
  spec.trials_per_point = 4;
  SweepOptions o;
  o.measure_runtime = false;
  const auto out = run_sweep(spec, params(100, 5), {Algorithm::kBroad}, o);
  std::map<double, double> offset;
  for (const auto& r : out.results) offset[r.sweep_value] += std::hypot(r.dbs_position.x, r.dbs_position.y);
  EXPECT_LE(offset[10], offset[15]);
  EXPECT_LE(offset[15], offset[20]);
}

}  // namespace
}  // namespace broad
