#include <cmath>
#include <stdexcept>

#include "broad/rng.hpp"
#include "broad/simharness.hpp"

namespace broad {

Scenario generate_scenario(const ScenarioParams& params, std::uint64_t seed) {
  if (!(params.poi_width_m > 0) || !(params.poi_height_m > 0)) {
    throw std::invalid_argument("PoI dimensions must be positive");
  }
  if (!(params.phi_mean_bps > 0) || !(params.phi_min_bps > 0) || !(params.phi_max_bps >= params.phi_min_bps)) {
    throw std::invalid_argument("rate distribution parameters are invalid");
  }
  if (!(params.delta_km >= 0)) {
    throw std::invalid_argument("delta must be non-negative");
  }

  Scenario s;
  s.seed = seed;
  s.poi_center_x_m = params.poi_center_x_m;
  s.poi_center_y_m = params.poi_center_y_m;
  s.poi_width_m = params.poi_width_m;
  s.poi_height_m = params.poi_height_m;
  s.initial_altitude_m = params.initial_altitude_m;
  s.network.config = params.config;
  s.network.mbs = {params.poi_center_x_m + params.delta_km * 1000.0, params.poi_center_y_m,
                   params.config.mbs_height_m};

  Rng rng(seed);
  const double x0 = params.poi_center_x_m - params.poi_width_m / 2;
  const double y0 = params.poi_center_y_m - params.poi_height_m / 2;
  s.network.users.reserve(params.users);
  for (std::size_t i = 0; i < params.users; ++i) {
    UserProfile u;
    u.x = rng.uniform(x0, x0 + params.poi_width_m);
    u.y = rng.uniform(y0, y0 + params.poi_height_m);
    do {
      u.phi = rng.exponential(params.phi_mean_bps);
    } while (u.phi < params.phi_min_bps || u.phi > params.phi_max_bps);
    s.network.users.push_back(u);
  }
  return s;
}

double truncated_exponential_mean(double mean, double lo, double hi) {
  const double ea = std::exp(-lo / mean);
  const double eb = std::exp(-hi / mean);
  return ((lo + mean) * ea - (hi + mean) * eb) / (ea - eb);
}

}  // namespace broad
