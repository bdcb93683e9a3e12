#include <atomic>
#include <chrono>
#include <optional>
#include <thread>

#include "broad/simharness.hpp"

namespace broad {

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::kDeltaKm:
      return "delta_km";
    case SweepVariable::kVisibilityKm:
      return "visibility_km";
  }
  return "unknown";
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kBroad:
      return "broad";
    case Algorithm::kCenterFixed:
      return "center-fixed";
    case Algorithm::kGridSearch:
      return "grid-search";
  }
  return "unknown";
}

std::optional<SweepVariable> parse_sweep_variable(const std::string& name) {
  if (name == "delta_km" || name == "delta") return SweepVariable::kDeltaKm;
  if (name == "visibility_km" || name == "visibility") return SweepVariable::kVisibilityKm;
  return std::nullopt;
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  if (name == "broad") return Algorithm::kBroad;
  if (name == "center-fixed") return Algorithm::kCenterFixed;
  if (name == "grid-search") return Algorithm::kGridSearch;
  return std::nullopt;
}

ScenarioParams apply_sweep_value(const ScenarioParams& base, SweepVariable variable, double value) {
  ScenarioParams p = base;
  switch (variable) {
    case SweepVariable::kDeltaKm:
      p.delta_km = value;
      break;
    case SweepVariable::kVisibilityKm:
      p.config.fso.visibility_km = value;
      p.config.fso.fixed_attenuation_db_per_km.reset();
      break;
  }
  return p;
}

BroadPlan run_algorithm(Algorithm algorithm, const Scenario& scenario, const SweepOptions& options) {
  GaConfig ga = options.ga;
  ga.rng_seed = scenario.seed;
  switch (algorithm) {
    case Algorithm::kBroad: {
      BroadOptions bo;
      bo.ga = ga;
      bo.sqp = options.sqp;
      return run_broad_on(scenario, bo);
    }
    case Algorithm::kCenterFixed:
      return baseline_center_fixed(scenario, ga, options.center_altitude_points);
    case Algorithm::kGridSearch:
      return baseline_grid_search(scenario, ga, options.grid_blocks, options.grid_altitude_points);
  }
  throw std::invalid_argument("unknown algorithm");
}

SweepOutcome run_sweep(const SweepSpec& spec, const ScenarioParams& base, const std::vector<Algorithm>& algorithms,
                       const SweepOptions& options) {
  struct Job {
    Algorithm algorithm;
    double value;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (Algorithm a : algorithms) {
    for (double v : spec.values) {
      for (std::size_t t = 0; t < spec.trials_per_point; ++t) jobs.push_back({a, v, t});
    }
  }

  struct Slot {
    std::optional<TrialResult> result;
    std::vector<TrialFailure> failures;
  };
  std::vector<Slot> slots(jobs.size());

  auto run_job = [&](std::size_t index) {
    const Job& job = jobs[index];
    Slot& slot = slots[index];
    const std::uint64_t seed = spec.base_seed + job.trial;
    auto fail = [&](const std::string& message) {
      slot.failures.push_back({to_string(job.algorithm), job.value, job.trial, message});
    };
    try {
      const Scenario scenario = generate_scenario(apply_sweep_value(base, spec.variable, job.value), seed);
      const auto t0 = std::chrono::steady_clock::now();
      const BroadPlan plan = run_algorithm(job.algorithm, scenario, options);
      const auto t1 = std::chrono::steady_clock::now();
      for (const auto& v : validate_plan(plan, scenario.network)) {
        fail(std::string("invalid plan: ") + to_string(v.kind) + ": " + v.message);
      }
      TrialResult r;
      r.algorithm = to_string(job.algorithm);
      r.sweep_variable = to_string(spec.variable);
      r.sweep_value = job.value;
      r.trial = job.trial;
      r.seed = seed;
      r.satisfied_count = plan.satisfied_count;
      r.backhaul_utilization = plan.utilization.backhaul;
      r.access_utilization = plan.utilization.access;
      r.dbs_position = plan.dbs_position;
      r.runtime_ms =
          options.measure_runtime ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
      slot.result = r;
    } catch (const std::exception& e) {
      fail(e.what());
    }
  };

  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) run_job(i);
      });
    }
  }

  SweepOutcome out;
  for (auto& slot : slots) {
    if (slot.result) out.results.push_back(std::move(*slot.result));
    for (auto& f : slot.failures) out.failures.push_back(std::move(f));
  }
  return out;
}

}  // namespace broad
