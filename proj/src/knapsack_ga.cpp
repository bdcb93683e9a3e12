#include "broad/knapsack_ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace broad {

namespace {

constexpr double kTieTolerance = 1e-9;

struct NormalizedItems {
  std::vector<double> rate;       // phi_i / r_fso
  std::vector<double> bandwidth;  // b_i / B
};

NormalizedItems normalize(const KnapsackInstance& inst) {
  NormalizedItems items;
  items.rate.reserve(inst.size());
  items.bandwidth.reserve(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    items.rate.push_back(inst.weights_rate[i] / inst.capacity_rate);
    items.bandwidth.push_back(inst.weights_bandwidth[i] / inst.capacity_bandwidth);
  }
  return items;
}

// Dual objective of the normalized relaxation at prices (mu1, mu2).
double dual_objective(const NormalizedItems& items, double mu1, double mu2) {
  double value = mu1 + mu2;
  for (std::size_t i = 0; i < items.rate.size(); ++i) {
    value += std::max(0.0, 1.0 - mu1 * items.rate[i] - mu2 * items.bandwidth[i]);
  }
  return value;
}

// Fractional fill of `mass` units over `order`, taking items front to back.
std::vector<double> fill_in_order(const std::vector<std::size_t>& order, double mass) {
  std::vector<double> z(order.size(), 0.0);
  for (std::size_t k = 0; k < order.size() && mass > 0; ++k) {
    z[k] = std::min(1.0, mass);
    mass -= z[k];
  }
  return z;
}

struct Ranked {
  std::size_t count;
  double bandwidth;
};

// Strict ordering used for elitist truncation and parent choice.
bool better(const Selection& a, const Ranked& ra, const Selection& b, const Ranked& rb) {
  if (ra.count != rb.count) return ra.count > rb.count;
  if (ra.bandwidth != rb.bandwidth) return ra.bandwidth < rb.bandwidth;
  return a < b;
}

Selection random_greedy_fill(const KnapsackInstance& inst, Rng& rng) {
  const std::size_t n = inst.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  Selection z(n, 0);
  double used_b = 0;
  double used_r = 0;
  for (std::size_t i : order) {
    if (used_b + inst.weights_bandwidth[i] <= inst.capacity_bandwidth &&
        used_r + inst.weights_rate[i] <= inst.capacity_rate) {
      z[i] = 1;
      used_b += inst.weights_bandwidth[i];
      used_r += inst.weights_rate[i];
    }
  }
  return z;
}

}  // namespace

void KnapsackInstance::validate() const {
  if (weights_bandwidth.size() != weights_rate.size()) {
    throw std::invalid_argument("knapsack weight lists differ in length");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (!(weights_bandwidth[i] > 0) || !(weights_rate[i] > 0) || !std::isfinite(weights_bandwidth[i]) ||
        !std::isfinite(weights_rate[i])) {
      throw std::invalid_argument("knapsack weights must be positive and finite (item " + std::to_string(i) + ")");
    }
  }
  if (!(capacity_bandwidth > 0) || !(capacity_rate > 0)) {
    throw std::invalid_argument("knapsack capacities must be positive");
  }
}

double selection_bandwidth(const Selection& z, const KnapsackInstance& inst) {
  double total = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i]) total += inst.weights_bandwidth[i];
  }
  return total;
}

double selection_rate(const Selection& z, const KnapsackInstance& inst) {
  double total = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i]) total += inst.weights_rate[i];
  }
  return total;
}

bool is_feasible(const Selection& z, const KnapsackInstance& inst) {
  if (z.size() != inst.size()) {
    throw std::invalid_argument("selection length does not match the instance");
  }
  return selection_bandwidth(z, inst) <= inst.capacity_bandwidth && selection_rate(z, inst) <= inst.capacity_rate;
}

LpRelaxation solve_lp_relaxation(const KnapsackInstance& inst) {
  inst.validate();
  const std::size_t n = inst.size();
  const NormalizedItems items = normalize(inst);

  // The dual objective is convex piecewise linear in (mu1, mu2) >= 0, so its
  // minimum sits on a vertex of the arrangement formed by the lines
  // mu1*a_i + mu2*c_i = 1 and the two axes. Each vertex is a candidate basis.
  double best_mu1 = 0;
  double best_mu2 = 0;
  double best_value = dual_objective(items, 0, 0);
  auto consider = [&](double mu1, double mu2) {
    if (!(mu1 >= 0) || !(mu2 >= 0) || !std::isfinite(mu1) || !std::isfinite(mu2)) return;
    const double value = dual_objective(items, mu1, mu2);
    if (value < best_value - 1e-12 * std::max(1.0, std::abs(best_value))) {
      best_value = value;
      best_mu1 = mu1;
      best_mu2 = mu2;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    consider(1.0 / items.rate[i], 0.0);
    consider(0.0, 1.0 / items.bandwidth[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double det = items.rate[i] * items.bandwidth[j] - items.rate[j] * items.bandwidth[i];
      if (std::abs(det) <= 1e-15 * std::abs(items.rate[i] * items.bandwidth[j])) continue;
      const double mu1 = (items.bandwidth[j] - items.bandwidth[i]) / det;
      const double mu2 = (items.rate[i] - items.rate[j]) / det;
      consider(mu1, mu2);
    }
  }

  // Recover a primal optimum satisfying complementary slackness: items with
  // positive reduced cost are taken, negative ones dropped, and the items on
  // the price boundary absorb whatever capacity the binding rows leave.
  std::vector<double> z(n, 0.0);
  std::vector<std::size_t> ties;
  double residual_rate = 1.0;
  double residual_bw = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double reduced = 1.0 - best_mu1 * items.rate[i] - best_mu2 * items.bandwidth[i];
    if (reduced > kTieTolerance) {
      z[i] = 1.0;
      residual_rate -= items.rate[i];
      residual_bw -= items.bandwidth[i];
    } else if (reduced >= -kTieTolerance) {
      ties.push_back(i);
    }
  }
  if (!ties.empty()) {
    if (best_mu1 > 0 && best_mu2 > 0) {
      // On the boundary every tie item has unit mass per unit price, so the
      // total mass is fixed; blend the rate-lightest and rate-heaviest fills
      // to hit the backhaul residual exactly. The bandwidth row then follows.
      double mass = best_mu1 * residual_rate + best_mu2 * residual_bw;
      mass = std::clamp(mass, 0.0, static_cast<double>(ties.size()));
      std::vector<std::size_t> light = ties;
      std::stable_sort(light.begin(), light.end(),
                       [&](std::size_t a, std::size_t b) { return items.rate[a] < items.rate[b]; });
      std::vector<std::size_t> heavy(light.rbegin(), light.rend());
      const std::vector<double> z_light = fill_in_order(light, mass);
      const std::vector<double> z_heavy = fill_in_order(heavy, mass);
      double rate_light = 0;
      double rate_heavy = 0;
      for (std::size_t k = 0; k < ties.size(); ++k) {
        rate_light += z_light[k] * items.rate[light[k]];
        rate_heavy += z_heavy[k] * items.rate[heavy[k]];
      }
      const double span = rate_heavy - rate_light;
      const double s = span > 0 ? std::clamp((residual_rate - rate_light) / span, 0.0, 1.0) : 0.0;
      for (std::size_t k = 0; k < ties.size(); ++k) {
        z[light[k]] += (1.0 - s) * z_light[k];
        z[heavy[k]] += s * z_heavy[k];
      }
    } else if (best_mu1 > 0 || best_mu2 > 0) {
      // Single binding row: the tie items share the same weight in it; fill
      // the binding row using the items lightest in the other row first.
      const bool rate_binding = best_mu1 > 0;
      const std::vector<double>& binding = rate_binding ? items.rate : items.bandwidth;
      const std::vector<double>& other = rate_binding ? items.bandwidth : items.rate;
      const double residual = rate_binding ? residual_rate : residual_bw;
      std::vector<std::size_t> order = ties;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return other[a] < other[b]; });
      double remaining = std::max(0.0, residual);
      for (std::size_t i : order) {
        if (remaining <= 0) break;
        const double take = std::min(1.0, remaining / binding[i]);
        z[i] = take;
        remaining -= take * binding[i];
      }
    } else {
      for (std::size_t i : ties) z[i] = 1.0;
    }
  }

  LpRelaxation out;
  out.duals.rate = best_mu1 / inst.capacity_rate;
  out.duals.bandwidth = best_mu2 / inst.capacity_bandwidth;
  out.primal = std::move(z);
  out.objective = std::accumulate(out.primal.begin(), out.primal.end(), 0.0);
  return out;
}

double utility_ratio(std::size_t i, const DualPrices& duals, const KnapsackInstance& inst) {
  const double denom = duals.rate * inst.weights_rate.at(i) + duals.bandwidth * inst.weights_bandwidth.at(i);
  if (!(denom > 0)) {
    throw std::domain_error("utility ratio undefined: both dual prices are zero");
  }
  return 2.0 / denom;
}

Selection repair(Selection z, const KnapsackInstance& inst, const DualPrices& duals) {
  if (z.size() != inst.size()) {
    throw std::invalid_argument("selection length does not match the instance");
  }
  const bool priced = duals.rate > 0 || duals.bandwidth > 0;
  // Removal priority per item; the selected item with the highest score goes first.
  std::vector<double> score(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    score[i] = priced ? utility_ratio(i, duals, inst)
                      : inst.weights_bandwidth[i] / inst.capacity_bandwidth +
                            inst.weights_rate[i] / inst.capacity_rate;
  }
  double used_b = selection_bandwidth(z, inst);
  double used_r = selection_rate(z, inst);
  while (used_b > inst.capacity_bandwidth || used_r > inst.capacity_rate) {
    std::size_t victim = inst.size();
    for (std::size_t i = 0; i < inst.size(); ++i) {
      if (z[i] && (victim == inst.size() || score[i] > score[victim])) victim = i;
    }
    if (victim == inst.size()) break;
    z[victim] = 0;
    used_b -= inst.weights_bandwidth[victim];
    used_r -= inst.weights_rate[victim];
    // Re-sum when the running totals approach the limits to avoid drift.
    if (used_b <= inst.capacity_bandwidth * (1 + 1e-9) && used_r <= inst.capacity_rate * (1 + 1e-9)) {
      used_b = selection_bandwidth(z, inst);
      used_r = selection_rate(z, inst);
    }
  }
  return z;
}

Selection greedy_fill(Selection z, const KnapsackInstance& inst, const DualPrices& duals) {
  if (z.size() != inst.size()) {
    throw std::invalid_argument("selection length does not match the instance");
  }
  std::vector<double> cost(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    cost[i] = duals.rate * inst.weights_rate[i] + duals.bandwidth * inst.weights_bandwidth[i];
    if (!(cost[i] > 0)) {
      cost[i] = inst.weights_bandwidth[i] / inst.capacity_bandwidth + inst.weights_rate[i] / inst.capacity_rate;
    }
  }
  std::vector<std::size_t> order(inst.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
  double used_b = selection_bandwidth(z, inst);
  double used_r = selection_rate(z, inst);
  for (std::size_t i : order) {
    if (z[i]) continue;
    if (used_b + inst.weights_bandwidth[i] <= inst.capacity_bandwidth &&
        used_r + inst.weights_rate[i] <= inst.capacity_rate) {
      z[i] = 1;
      used_b += inst.weights_bandwidth[i];
      used_r += inst.weights_rate[i];
    }
  }
  return z;
}

Selection crossover(const Selection& parent1, const Selection& parent2, Rng& rng) {
  if (parent1.size() != parent2.size()) {
    throw std::invalid_argument("crossover parents differ in length");
  }
  Selection child(parent1.size());
  for (std::size_t i = 0; i < child.size(); ++i) {
    child[i] = rng.coin() ? parent1[i] : parent2[i];
  }
  return child;
}

Selection mutate(Selection z, std::size_t flips, Rng& rng) {
  if (flips > z.size()) {
    throw std::invalid_argument("more mutation flips than positions");
  }
  // Partial Fisher-Yates: the first `flips` entries are distinct positions.
  std::vector<std::size_t> positions(z.size());
  std::iota(positions.begin(), positions.end(), 0);
  for (std::size_t k = 0; k < flips; ++k) {
    std::swap(positions[k], positions[k + rng.below(z.size() - k)]);
    z[positions[k]] ^= 1;
  }
  return z;
}

GaResult run_ga_detailed(const KnapsackInstance& inst, const GaConfig& cfg) {
  inst.validate();
  if (cfg.population_size < 2 || cfg.population_size % 2 != 0) {
    throw std::invalid_argument("GA population size must be even and at least 2");
  }
  if (cfg.offspring_per_generation < 1) {
    throw std::invalid_argument("GA needs at least one offspring per generation");
  }
  const std::size_t n = inst.size();
  const std::size_t flips = std::min(cfg.mutation_flips, n);
  Rng rng(cfg.rng_seed);
  GaResult result;

  struct Member {
    Selection z;
    Ranked rank;
  };
  auto make_member = [&](Selection z) {
    Ranked r{selected_count(z), selection_bandwidth(z, inst)};
    return Member{std::move(z), r};
  };
  auto by_quality = [](const Member& a, const Member& b) { return better(a.z, a.rank, b.z, b.rank); };

  std::vector<Member> population;
  population.reserve(cfg.population_size + cfg.offspring_per_generation);
  for (std::size_t k = 0; k < cfg.population_size; ++k) {
    population.push_back(make_member(random_greedy_fill(inst, rng)));
  }
  if (n == 0) {
    result.best = population.front().z;
    result.best_count_history.push_back(0);
    return result;
  }

  const DualPrices duals = solve_lp_dual(inst);
  auto best_count = [&] {
    std::size_t f = 0;
    for (const auto& m : population) f = std::max(f, m.rank.count);
    return f;
  };
  std::size_t f = best_count();
  result.best_count_history.push_back(f);

  std::vector<std::size_t> order(population.size());
  for (std::size_t gen = 0; gen < cfg.max_generations; ++gen) {
    // Random equal split; the best of each half become the parents.
    order.resize(population.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    const std::size_t half = order.size() / 2;
    auto pick = [&](std::size_t lo, std::size_t hi) {
      std::size_t best = order[lo];
      for (std::size_t k = lo + 1; k < hi; ++k) {
        if (by_quality(population[order[k]], population[best])) best = order[k];
      }
      return best;
    };
    const Selection parent1 = population[pick(0, half)].z;
    const Selection parent2 = population[pick(half, order.size())].z;

    for (std::size_t k = 0; k < cfg.offspring_per_generation; ++k) {
      Selection child = mutate(crossover(parent1, parent2, rng), flips, rng);
      if (!is_feasible(child, inst)) child = repair(std::move(child), inst, duals);
      child = greedy_fill(std::move(child), inst, duals);
      population.push_back(make_member(std::move(child)));
    }

    // Union of old and new generations, best n kept.
    std::sort(population.begin(), population.end(), by_quality);
    population.erase(std::unique(population.begin(), population.end(),
                                 [](const Member& a, const Member& b) { return a.z == b.z; }),
                     population.end());
    if (population.size() > cfg.population_size) population.resize(cfg.population_size);

    ++result.generations;
    const std::size_t f_new = best_count();
    result.best_count_history.push_back(f_new);
    if (f_new <= f) break;
    f = f_new;
  }

  result.best = std::min_element(population.begin(), population.end(), by_quality)->z;
  return result;
}

Selection brute_force(const KnapsackInstance& inst) {
  inst.validate();
  const std::size_t n = inst.size();
  if (n > 24) {
    throw std::invalid_argument("brute_force supports at most 24 users");
  }
  Selection best(n, 0);
  Ranked best_rank{0, 0.0};
  Selection z(n, 0);
  double used_b = 0;
  double used_r = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  // Gray-code walk: one item toggles per step.
  for (std::uint64_t step = 1; step < total; ++step) {
    const std::size_t bit = static_cast<std::size_t>(__builtin_ctzll(step));
    z[bit] ^= 1;
    const double sign = z[bit] ? 1.0 : -1.0;
    used_b += sign * inst.weights_bandwidth[bit];
    used_r += sign * inst.weights_rate[bit];
    // Running sums may drift, so confirm borderline candidates exactly.
    if (used_b > inst.capacity_bandwidth * (1 + 1e-9) || used_r > inst.capacity_rate * (1 + 1e-9)) continue;
    const std::size_t count = selected_count(z);
    if (count < best_rank.count) continue;
    if (!is_feasible(z, inst)) continue;
    const Ranked rank{count, selection_bandwidth(z, inst)};
    if (better(z, rank, best, best_rank)) {
      best = z;
      best_rank = rank;
    }
  }
  return best;
}

KnapsackInstance make_access_instance(const Network& net, const Position3D& dbs) {
  KnapsackInstance inst;
  inst.weights_bandwidth.reserve(net.users.size());
  inst.weights_rate.reserve(net.users.size());
  for (const auto& user : net.users) {
    inst.weights_bandwidth.push_back(required_bandwidth(dbs, user, net.config.access));
    inst.weights_rate.push_back(user.phi);
  }
  inst.capacity_bandwidth = net.config.access.bandwidth_hz;
  inst.capacity_rate = fso_rate(net.mbs, dbs, net.config.fso);
  return inst;
}

}  // namespace broad
