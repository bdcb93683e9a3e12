#include <algorithm>
#include <stdexcept>

#include "broad/simharness.hpp"

namespace broad {

namespace {

std::vector<double> altitude_grid(const AltitudeBounds& alt, std::size_t points) {
  if (points == 0) throw std::invalid_argument("altitude grid needs at least one point");
  std::vector<double> grid;
  grid.reserve(points);
  if (points == 1) {
    grid.push_back(alt.h_min);
    return grid;
  }
  for (std::size_t k = 0; k < points; ++k) {
    grid.push_back(alt.h_min + (alt.h_max - alt.h_min) * static_cast<double>(k) / static_cast<double>(points - 1));
  }
  grid.back() = alt.h_max;
  return grid;
}

// More satisfied users first, then the lower path utilization.
bool improves(const BroadPlan& candidate, const BroadPlan& incumbent) {
  if (candidate.satisfied_count != incumbent.satisfied_count) {
    return candidate.satisfied_count > incumbent.satisfied_count;
  }
  return candidate.utilization.max() < incumbent.utilization.max();
}

BroadPlan best_over(const Scenario& scenario, const GaConfig& ga, const std::vector<Position3D>& candidates) {
  BroadPlan best;
  bool have = false;
  std::size_t evaluated = 0;
  for (const auto& pos : candidates) {
    BroadPlan plan = solve_access_at(scenario.network, pos, ga);
    ++evaluated;
    if (!have || improves(plan, best)) {
      best = std::move(plan);
      have = true;
    }
  }
  best.iterations = evaluated;
  return best;
}

}  // namespace

BroadPlan baseline_center_fixed(const Scenario& scenario, const GaConfig& ga, std::size_t altitude_points) {
  std::vector<Position3D> candidates;
  for (double h : altitude_grid(scenario.network.config.altitude, altitude_points)) {
    candidates.push_back(scenario.poi_center(h));
  }
  return best_over(scenario, ga, candidates);
}

BroadPlan baseline_grid_search(const Scenario& scenario, const GaConfig& ga, std::size_t blocks,
                               std::size_t altitude_points) {
  if (blocks == 0) throw std::invalid_argument("grid search needs at least one block per axis");
  const auto heights = altitude_grid(scenario.network.config.altitude, altitude_points);
  const double bw = scenario.poi_width_m / static_cast<double>(blocks);
  const double bh = scenario.poi_height_m / static_cast<double>(blocks);
  const double x0 = scenario.poi_center_x_m - scenario.poi_width_m / 2;
  const double y0 = scenario.poi_center_y_m - scenario.poi_height_m / 2;
  std::vector<Position3D> candidates;
  for (std::size_t bx = 0; bx < blocks; ++bx) {
    for (std::size_t by = 0; by < blocks; ++by) {
      for (double h : heights) {
        candidates.push_back({x0 + (static_cast<double>(bx) + 0.5) * bw, y0 + (static_cast<double>(by) + 0.5) * bh, h});
      }
    }
  }
  return best_over(scenario, ga, candidates);
}

BroadPlan run_broad_on(const Scenario& scenario, const BroadOptions& options) {
  const auto& alt = scenario.network.config.altitude;
  const double h0 = std::clamp(scenario.initial_altitude_m, alt.h_min, alt.h_max);
  return run_broad(scenario.network, scenario.poi_center(h0), options);
}

}  // namespace broad
