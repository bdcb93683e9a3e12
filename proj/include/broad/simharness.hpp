#ifndef BROAD_SIMHARNESS_HPP
#define BROAD_SIMHARNESS_HPP

// Scenario generation, baselines, parameter sweeps and result I/O.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "broad/broad.hpp"

namespace broad {

struct ScenarioParams {
  std::size_t users = 100;
  double delta_km = 15;       // horizontal PoI-center to MBS distance
  double poi_width_m = 500;
  double poi_height_m = 500;
  double poi_center_x_m = 0;
  double poi_center_y_m = 0;
  double phi_mean_bps = 5e6;  // exponential mean before truncation
  double phi_min_bps = 5e5;
  double phi_max_bps = 5e8;
  double initial_altitude_m = 50;
  NetworkConfig config;

  static constexpr std::size_t kFullScaleUsers = 500;
};

struct Scenario {
  Network network;
  double poi_center_x_m = 0;
  double poi_center_y_m = 0;
  double poi_width_m = 0;
  double poi_height_m = 0;
  double initial_altitude_m = 50;
  std::uint64_t seed = 0;

  Position3D poi_center(double h) const { return {poi_center_x_m, poi_center_y_m, h}; }
};

// Users uniform over the PoI; rates exponential, redrawn until inside
// [phi_min, phi_max]. The MBS sits at (center_x + delta, center_y, h_m).
Scenario generate_scenario(const ScenarioParams& params, std::uint64_t seed);

// Mean of the exponential distribution truncated to [lo, hi].
double truncated_exponential_mean(double mean, double lo, double hi);

// DBS above the PoI center; altitude picked from an evenly spaced grid over
// [h_min, h_max] to maximize the satisfied count.
BroadPlan baseline_center_fixed(const Scenario& scenario, const GaConfig& ga, std::size_t altitude_points = 101);

// Brute force over block centers of a blocks x blocks partition of the PoI,
// each evaluated at an evenly spaced altitude grid.
BroadPlan baseline_grid_search(const Scenario& scenario, const GaConfig& ga, std::size_t blocks,
                               std::size_t altitude_points = 11);

BroadPlan run_broad_on(const Scenario& scenario, const BroadOptions& options);

enum class SweepVariable { kDeltaKm, kVisibilityKm };
enum class Algorithm { kBroad, kCenterFixed, kGridSearch };

const char* to_string(SweepVariable v);
const char* to_string(Algorithm a);
std::optional<SweepVariable> parse_sweep_variable(const std::string& name);
std::optional<Algorithm> parse_algorithm(const std::string& name);

struct SweepSpec {
  SweepVariable variable = SweepVariable::kDeltaKm;
  std::vector<double> values;
  std::size_t trials_per_point = 10;
  std::uint64_t base_seed = 1;
};

struct SweepOptions {
  GaConfig ga;
  SqpOptions sqp;
  std::size_t grid_blocks = 5;
  std::size_t center_altitude_points = 101;
  std::size_t grid_altitude_points = 11;
  bool measure_runtime = true;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct TrialResult {
  std::string algorithm;
  std::string sweep_variable;
  double sweep_value = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t satisfied_count = 0;
  double backhaul_utilization = 0;
  double access_utilization = 0;
  Position3D dbs_position;
  double runtime_ms = 0;
};

struct TrialFailure {
  std::string algorithm;
  double sweep_value = 0;
  std::size_t trial = 0;
  std::string message;
};

struct SweepOutcome {
  std::vector<TrialResult> results;  // ordered by algorithm, sweep value, trial
  std::vector<TrialFailure> failures;
};

// Scenario for one sweep point: delta moves the MBS; visibility replaces the
// fixed attenuation with the visibility-derived one.
ScenarioParams apply_sweep_value(const ScenarioParams& base, SweepVariable variable, double value);

BroadPlan run_algorithm(Algorithm algorithm, const Scenario& scenario, const SweepOptions& options);

SweepOutcome run_sweep(const SweepSpec& spec, const ScenarioParams& base, const std::vector<Algorithm>& algorithms,
                       const SweepOptions& options = {});

enum class ResultFormat { kCsv, kJsonLines };

std::optional<ResultFormat> parse_result_format(const std::string& name);
void emit_results(const std::vector<TrialResult>& results, ResultFormat format, std::ostream& out);
// Throws std::runtime_error when the file cannot be written.
void emit_results(const std::vector<TrialResult>& results, ResultFormat format, const std::string& path);
std::vector<TrialResult> parse_results(std::istream& in, ResultFormat format);

// Flat "key = value" files; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;
KeyValues read_key_values(std::istream& in);
KeyValues read_key_values_file(const std::string& path);
// Applies recognized keys onto `params`; throws std::invalid_argument on an
// unknown key or a malformed value.
void apply_key_values(const KeyValues& kv, ScenarioParams& params);

// Plan files carry the network (users, MBS, constants) and the plan so they
// can be audited on their own.
void write_plan_file(std::ostream& out, const Network& net, const BroadPlan& plan);
void read_plan_file(std::istream& in, Network& net, BroadPlan& plan);

}  // namespace broad

#endif  // BROAD_SIMHARNESS_HPP
