// broad: solve one scenario, run a parameter sweep, or audit a plan file.
//
// Exit codes: 0 success, 1 invalid input, 2 solver failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "broad/simharness.hpp"

namespace {

constexpr int kInvalidInput = 1;
constexpr int kSolverFailure = 2;

struct CommonFlags {
  std::size_t users = 100;
  bool full_scale = false;
  double delta_km = 15;
  std::optional<double> visibility_km;
  std::uint64_t seed = 1;
  std::string config_path;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--users", f.users, "number of users")->check(CLI::NonNegativeNumber);
  app->add_flag("--full-scale", f.full_scale, "use 500 users");
  app->add_option("--delta-km", f.delta_km, "PoI-center to MBS distance (km)")->check(CLI::PositiveNumber);
  app->add_option("--visibility-km", f.visibility_km,
                  "visibility distance (km); replaces the fixed attenuation")
      ->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "scenario seed");
  app->add_option("--config", f.config_path, "key = value scenario/config file");
}

// Config file first, explicit flags on top.
broad::ScenarioParams scenario_params(const CommonFlags& f, const CLI::App& app) {
  broad::ScenarioParams p;
  if (!f.config_path.empty()) broad::apply_key_values(broad::read_key_values_file(f.config_path), p);
  if (app.count("--users") || f.config_path.empty()) p.users = f.users;
  if (f.full_scale) p.users = broad::ScenarioParams::kFullScaleUsers;
  if (app.count("--delta-km") || f.config_path.empty()) p.delta_km = f.delta_km;
  if (f.visibility_km) {
    p.config.fso.visibility_km = *f.visibility_km;
    p.config.fso.fixed_attenuation_db_per_km.reset();
  }
  return p;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> values;
  std::istringstream is(list);
  std::string item;
  while (std::getline(is, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size() || !(v > 0)) throw std::invalid_argument("sweep values must be positive numbers: " + list);
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("sweep values are empty");
  return values;
}

std::vector<broad::Algorithm> parse_algorithms(const std::string& list) {
  std::vector<broad::Algorithm> out;
  std::istringstream is(list);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    const auto a = broad::parse_algorithm(item);
    if (!a) throw std::invalid_argument("unknown algorithm '" + item + "'");
    out.push_back(*a);
  }
  return out;
}

void print_report(std::ostream& out, const broad::Scenario& s, const broad::BroadPlan& plan) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "users            %zu\n", s.network.users.size());
  out << buf;
  std::snprintf(buf, sizeof buf, "mbs              (%.1f, %.1f, %.1f) m\n", s.network.mbs.x, s.network.mbs.y,
                s.network.mbs.h);
  out << buf;
  std::snprintf(buf, sizeof buf, "dbs              (%.3f, %.3f, %.3f) m\n", plan.dbs_position.x, plan.dbs_position.y,
                plan.dbs_position.h);
  out << buf;
  std::snprintf(buf, sizeof buf, "satisfied        %zu\n", plan.satisfied_count);
  out << buf;
  std::snprintf(buf, sizeof buf, "backhaul util    %.6f\n", plan.utilization.backhaul);
  out << buf;
  std::snprintf(buf, sizeof buf, "access util      %.6f\n", plan.utilization.access);
  out << buf;
  std::snprintf(buf, sizeof buf, "fso rate         %.6g bps\n", broad::fso_rate(s.network.mbs, plan.dbs_position,
                                                                               s.network.config.fso));
  out << buf;
  std::snprintf(buf, sizeof buf, "iterations       %zu\n", plan.iterations);
  out << buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DBS placement and backhaul-aware bandwidth allocation"};
  app.require_subcommand(1);

  CommonFlags solve_flags;
  std::string algorithm_name = "broad";
  std::string plan_out;
  auto* solve = app.add_subcommand("solve", "plan one scenario and print a report");
  add_common(solve, solve_flags);
  solve->add_option("--algorithm,--algorithms", algorithm_name, "broad | center-fixed | grid-search");
  solve->add_option("--output", plan_out, "write the plan file here");

  CommonFlags sweep_flags;
  std::string variable = "delta_km";
  std::string values = "5,10,15,20";
  std::size_t trials = 10;
  std::string algorithms = "broad,center-fixed";
  std::string sweep_out;
  std::string format = "csv";
  bool no_timing = false;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and emit CSV or JSON lines");
  add_common(sweep, sweep_flags);
  sweep->add_option("--variable", variable, "delta_km | visibility_km");
  sweep->add_option("--values", values, "comma-separated sweep values");
  sweep->add_option("--trials", trials, "trials per sweep value");
  sweep->add_option("--algorithms", algorithms, "comma-separated: broad, center-fixed, grid-search");
  sweep->add_option("--output", sweep_out, "output path (default stdout)");
  sweep->add_option("--format", format, "csv | json-lines");
  sweep->add_flag("--no-timing", no_timing, "record runtime_ms as 0 so output is reproducible");
  sweep->add_option("--threads", threads, "worker threads (0: hardware concurrency)");

  std::string plan_path;
  auto* validate = app.add_subcommand("validate", "audit a plan file against every constraint");
  validate->add_option("plan", plan_path, "plan file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInvalidInput;
  }

  if (*solve) {
    broad::Scenario scenario;
    broad::Algorithm algorithm;
    try {
      const auto a = broad::parse_algorithm(algorithm_name);
      if (!a) throw std::invalid_argument("unknown algorithm '" + algorithm_name + "'");
      algorithm = *a;
      scenario = broad::generate_scenario(scenario_params(solve_flags, *solve), solve_flags.seed);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInvalidInput;
    }
    broad::BroadPlan plan;
    try {
      plan = broad::run_algorithm(algorithm, scenario, broad::SweepOptions{});
    } catch (const std::exception& e) {
      std::cerr << "solver failure: " << e.what() << '\n';
      return kSolverFailure;
    }
    print_report(std::cout, scenario, plan);
    if (!plan_out.empty()) {
      std::ofstream out(plan_out);
      broad::write_plan_file(out, scenario.network, plan);
      if (!out) {
        std::cerr << "error: cannot write " << plan_out << '\n';
        return kInvalidInput;
      }
    }
    const auto violations = broad::validate_plan(plan, scenario.network);
    for (const auto& v : violations) std::cerr << "violation: " << to_string(v.kind) << ": " << v.message << '\n';
    return violations.empty() ? 0 : kSolverFailure;
  }

  if (*sweep) {
    broad::SweepSpec spec;
    broad::ScenarioParams base;
    std::vector<broad::Algorithm> algos;
    broad::ResultFormat fmt{};
    try {
      const auto var = broad::parse_sweep_variable(variable);
      if (!var) throw std::invalid_argument("unknown sweep variable '" + variable + "'");
      const auto f = broad::parse_result_format(format);
      if (!f) throw std::invalid_argument("unknown format '" + format + "'");
      fmt = *f;
      spec.variable = *var;
      spec.values = parse_values(values);
      spec.trials_per_point = trials;
      spec.base_seed = sweep_flags.seed;
      base = scenario_params(sweep_flags, *sweep);
      algos = parse_algorithms(algorithms);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInvalidInput;
    }
    broad::SweepOptions options;
    options.measure_runtime = !no_timing;
    options.threads = threads;
    const auto outcome = broad::run_sweep(spec, base, algos, options);
    try {
      if (sweep_out.empty()) {
        broad::emit_results(outcome.results, fmt, std::cout);
      } else {
        broad::emit_results(outcome.results, fmt, sweep_out);
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInvalidInput;
    }
    for (const auto& f : outcome.failures) {
      std::cerr << "trial failure: " << f.algorithm << " value=" << f.sweep_value << " trial=" << f.trial << ": "
                << f.message << '\n';
    }
    return outcome.failures.empty() ? 0 : kSolverFailure;
  }

  broad::Network net;
  broad::BroadPlan plan;
  try {
    std::ifstream in(plan_path);
    if (!in) throw std::invalid_argument("cannot open " + plan_path);
    broad::read_plan_file(in, net, plan);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  const auto violations = broad::validate_plan(plan, net);
  for (const auto& v : violations) std::cout << to_string(v.kind) << ": " << v.message << '\n';
  if (violations.empty()) std::cout << "ok: no violations\n";
  return violations.empty() ? 0 : 1;
}
