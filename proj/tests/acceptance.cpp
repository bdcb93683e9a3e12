// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance 3 5        run only criteria 3 and 5
//
// Exit status is non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "broad/simharness.hpp"
#include "oracles.hpp"

using namespace broad;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1: model oracles ----
Verdict models() {
  Verdict v;
  int exact = 0;
  const double points[] = {0.3, 0.5, 0.75, 1, 3, 6, 10, 50, 60};
  // piecewise values written out branch by branch
  const double expected[] = {0.0, 0.0, 0.75 - 0.5, 1.0 - 0.5, 0.16 * 3 + 0.34, 0.16 * 6 + 0.34, 1.3, 1.3, 1.6};
  for (int i = 0; i < 9; ++i) exact += scattering_exponent_q(points[i]) == expected[i];

  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0, 1);
  double worst_gamma = 0, worst_rate = 0;
  for (int t = 0; t < 10; ++t) {
    FsoLinkParams p;
    p.power_w = 1e-4 + 1e-2 * u(gen);
    p.tau_tx = 0.5 + 0.5 * u(gen);
    p.tau_rx = 0.5 + 0.5 * u(gen);
    p.aperture_diameter_m = 0.01 + 0.1 * u(gen);
    p.divergence_rad = 1e-5 + 2e-3 * u(gen);
    p.wavelength_m = (800 + 800 * u(gen)) * 1e-9;
    p.visibility_km = 0.2 + 60 * u(gen);
    p.receiver_sensitivity = 1e3 + 1e5 * u(gen);
    p.fixed_attenuation_db_per_km.reset();
    const double length = 200 + 20000 * u(gen);
    const double g = oracle::gamma_db_per_km(p.visibility_km, p.wavelength_m);
    const double r = oracle::fso_rate({p.power_w, p.tau_tx, p.tau_rx, p.aperture_diameter_m, p.divergence_rad,
                                       p.wavelength_m, p.planck, p.speed_of_light, p.receiver_sensitivity, g, length});
    worst_gamma = std::max(worst_gamma, std::abs(attenuation_gamma(p) - g) / g);
    worst_rate = std::max(worst_rate, std::abs(fso_rate(length, p) - r) / r);
  }
  v.pass = exact == 9 && worst_gamma <= 1e-10 && worst_rate <= 1e-10;
  v.detail = fmt("q exact at %d/9 points; gamma max rel err %.2e, fso_rate max rel err %.2e (tol 1e-10)", exact,
                 worst_gamma, worst_rate);
  return v;
}

// ---- 2: GA vs brute force ----
Verdict knapsack() {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> fill(0.2, 0.8);
  int optimal = 0, within_one = 0, feasible = 0;
  const int n = 50;
  for (int s = 0; s < n; ++s) {
    const auto inst = oracle::random_instance(gen, 12, fill(gen), fill(gen));
    GaConfig cfg;
    cfg.rng_seed = static_cast<std::uint64_t>(s) + 1;
    const auto z = run_ga(inst, cfg);
    const std::size_t best = selected_count(brute_force(inst));
    const std::size_t got = selected_count(z);
    feasible += is_feasible(z, inst);
    optimal += got == best;
    within_one += got + 1 >= best;
  }
  Verdict v;
  v.pass = feasible == n && optimal >= 0.80 * n && within_one >= 0.98 * n;
  v.detail = fmt("optimum on %d/%d (need >= 80%%), within 1 on %d/%d (need >= 98%%), feasible %d/%d", optimal, n,
                 within_one, n, feasible, n);
  return v;
}

// ---- 3: QP KKT ----
Verdict qp() {
  std::mt19937_64 gen(99);
  int ok = 0;
  double worst_kkt = 0, worst_obj = 0;
  for (int t = 0; t < 100; ++t) {
    const auto prob = oracle::random_qp(gen);
    const auto s = active_set_solve(prob);
    if (!s.ok()) continue;
    const auto r = oracle::kkt_residuals(prob, s.x, s.multipliers);
    const auto ref = oracle::qp_by_subsets(prob);
    const double f = 0.5 * s.x.dot(prob.hessian * s.x) + prob.gradient.dot(s.x);
    const double obj_err = std::abs(f - ref.objective) / std::max(1.0, std::abs(ref.objective));
    const double kkt = std::max({r.stationarity, r.primal, r.complementarity});
    worst_kkt = std::max(worst_kkt, kkt);
    worst_obj = std::max(worst_obj, obj_err);
    ok += kkt <= 1e-8 && r.dual == 0 && ref.feasible && obj_err <= 1e-6;
  }
  Verdict v;
  v.pass = ok == 100;
  v.detail = fmt("%d/100 QPs pass; worst KKT residual %.2e (tol 1e-8), worst objective gap %.2e (tol 1e-6)", ok,
                 worst_kkt, worst_obj);
  return v;
}

// ---- 4: SQP vs grid ----
Verdict sqp() {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> delta(5, 20);
  int ok = 0, nontrivial = 0;
  double worst_ratio = 0;
  for (int t = 0; t < 10; ++t) {
    ScenarioParams p;
    p.users = 20;
    p.delta_km = delta(gen);
    const auto s = generate_scenario(p, 1000 + static_cast<std::uint64_t>(t));
    GaConfig ga;
    ga.rng_seed = s.seed;
    const auto start = s.poi_center(p.initial_altitude_m);
    const auto plan = solve_access_at(s.network, start, ga);
    const auto r = sqp_solve(start, plan.z, s.network);
    const auto grid = oracle::placement_grid(s.network, plan.z);
    nontrivial += plan.satisfied_count > 0;
    const double ratio = grid.best > 0 ? r.varsigma / grid.best : (r.varsigma == 0 ? 1.0 : INFINITY);
    worst_ratio = std::max(worst_ratio, ratio);
    ok += r.varsigma <= grid.best * 1.02;
  }
  Verdict v;
  v.pass = ok == 10;
  v.detail = fmt("%d/10 scenarios within 2%% of the 21x21x11 grid minimum (%d with a non-empty selection); worst "
                 "sqp/grid ratio %.4f",
                 ok, nontrivial, worst_ratio);
  return v;
}

// ---- 5: BROAD audit ----
Verdict audit() {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::size_t> users(20, 100);
  std::uniform_real_distribution<double> delta(5, 20);
  int valid = 0, monotone = 0;
  std::string first_problem;
  for (int t = 0; t < 100; ++t) {
    ScenarioParams p;
    p.users = users(gen);
    p.delta_km = delta(gen);
    const auto s = generate_scenario(p, 5000 + static_cast<std::uint64_t>(t));
    BroadOptions o;
    o.ga.rng_seed = s.seed;
    std::vector<std::size_t> best;
    o.iteration_log = [&](const BroadIterationRecord& r) { best.push_back(r.best_count); };
    const auto plan = run_broad_on(s, o);
    const auto violations = validate_plan(plan, s.network);
    valid += violations.empty();
    if (!violations.empty() && first_problem.empty()) first_problem = to_string(violations[0].kind);
    bool mono = !best.empty();
    for (std::size_t i = 1; i < best.size(); ++i) mono = mono && best[i] >= best[i - 1];
    monotone += mono && best.back() == plan.satisfied_count;
  }
  Verdict v;
  v.pass = valid == 100 && monotone == 100;
  v.detail = fmt("%d/100 plans with zero violations, best count non-decreasing in %d/100 logs%s%s", valid, monotone,
                 first_problem.empty() ? "" : "; first violation: ", first_problem.c_str());
  return v;
}

struct Means {
  std::map<double, double> count, backhaul, access, offset;
};

Means means_for(const std::vector<TrialResult>& rows, const std::string& algorithm) {
  Means m;
  std::map<double, int> n;
  for (const auto& r : rows) {
    if (r.algorithm != algorithm) continue;
    m.count[r.sweep_value] += static_cast<double>(r.satisfied_count);
    m.backhaul[r.sweep_value] += r.backhaul_utilization;
    m.access[r.sweep_value] += r.access_utilization;
    m.offset[r.sweep_value] += r.dbs_position.x;  // the MBS lies on the +x axis from the PoI center
    n[r.sweep_value] += 1;
  }
  for (auto* field : {&m.count, &m.backhaul, &m.access, &m.offset}) {
    for (auto& [k, val] : *field) val /= n[k];
  }
  return m;
}

SweepOutcome delta_sweep() {
  SweepSpec spec;
  spec.variable = SweepVariable::kDeltaKm;
  spec.values = {5, 10, 15, 20};
  spec.trials_per_point = 10;
  spec.base_seed = 1;
  SweepOptions o;
  o.measure_runtime = false;
  ScenarioParams base;
  base.users = 100;
  return run_sweep(spec, base, {Algorithm::kBroad, Algorithm::kCenterFixed}, o);
}

std::string table(const Means& b, const Means& c) {
  std::string s;
  for (const auto& [k, val] : b.count) {
    s += fmt(" [%g: broad %.1f vs center %.1f, util %.3f/%.3f, offset %.0f m]", k, val, c.count.at(k),
             b.backhaul.at(k), b.access.at(k), b.offset.at(k));
  }
  return s;
}

// ---- 6: delta sweep ----
Verdict delta_trend() {
  const auto out = delta_sweep();
  const auto b = means_for(out.results, "broad");
  const auto c = means_for(out.results, "center-fixed");
  bool a = out.failures.empty() && out.results.size() == 80;
  for (double d : {5.0, 10.0, 15.0, 20.0}) a = a && b.count.at(d) >= c.count.at(d);
  for (double d : {15.0, 20.0}) a = a && b.count.at(d) > c.count.at(d);
  bool util = true;
  for (double d : {15.0, 20.0}) util = util && b.backhaul.at(d) >= 0.85 && b.access.at(d) >= 0.85;
  const bool offset = b.offset.at(20) > b.offset.at(10);
  Verdict v;
  v.pass = a && util && offset;
  v.detail = fmt("(a) %s (b) %s (c) %s;", a ? "ok" : "FAIL", util ? "ok" : "FAIL", offset ? "ok" : "FAIL") +
             table(b, c) + fmt(" failures=%zu", out.failures.size());
  return v;
}

// ---- 7: visibility sweep ----
Verdict visibility_trend() {
  SweepSpec spec;
  spec.variable = SweepVariable::kVisibilityKm;
  spec.values = {1, 2, 3, 5};
  spec.trials_per_point = 10;
  spec.base_seed = 1;
  SweepOptions o;
  o.measure_runtime = false;
  ScenarioParams base;
  base.users = 100;
  base.delta_km = 5;
  const auto out = run_sweep(spec, base, {Algorithm::kBroad, Algorithm::kCenterFixed}, o);
  const auto b = means_for(out.results, "broad");
  const auto c = means_for(out.results, "center-fixed");
  bool dominance = out.failures.empty() && out.results.size() == 80;
  for (double x : spec.values) dominance = dominance && b.count.at(x) >= c.count.at(x);
  dominance = dominance && b.count.at(1) > c.count.at(1);
  bool monotone = true;
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    const double lo = spec.values[i - 1], hi = spec.values[i];
    monotone = monotone && b.count.at(lo) <= b.count.at(hi) + 1 && c.count.at(lo) <= c.count.at(hi) + 1;
  }
  Verdict v;
  v.pass = dominance && monotone;
  v.detail = fmt("dominance %s, non-increasing as v falls %s;", dominance ? "ok" : "FAIL", monotone ? "ok" : "FAIL") +
             table(b, c);
  return v;
}

// ---- 8: determinism ----
Verdict determinism() {
  auto csv = [] {
    std::ostringstream os;
    emit_results(delta_sweep().results, ResultFormat::kCsv, os);
    return os.str();
  };
  const std::string first = csv();
  const std::string second = csv();
  Verdict v;
  v.pass = first == second && first.size() > 200;
  v.detail = fmt("two delta sweeps with base_seed 1: %zu and %zu bytes, %s", first.size(), second.size(),
                 first == second ? "byte-identical" : "DIFFERENT");
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // runtime budget; infinite when none is stated
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "model oracle suite", 1, models},
      {2, "knapsack oracle equivalence", 30, knapsack},
      {3, "QP/KKT suite", 10, qp},
      {4, "SQP vs grid oracle", 300, sqp},
      {5, "BROAD constraint audit", 600, audit},
      {6, "delta-sweep trend", 900, delta_trend},
      {7, "visibility-sweep trend", 900, visibility_trend},
      {8, "determinism", INFINITY, determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    const bool in_time = secs < c.limit_s;
    const bool pass = v.pass && in_time;
    failures += !pass;
    const std::string limit = std::isinf(c.limit_s) ? "no limit" : fmt("limit %.0f s", c.limit_s);
    std::printf("%s criterion %d (%s): %s; runtime %.2f s (%s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs, limit.c_str(), in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
