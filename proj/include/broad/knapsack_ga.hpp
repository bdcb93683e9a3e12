#ifndef BROAD_KNAPSACK_GA_HPP
#define BROAD_KNAPSACK_GA_HPP

// User access control as a two-constraint 0-1 knapsack with unit values:
// pick the largest set of users whose bandwidth fits the access budget and
// whose rates fit the FSO backhaul. Solved by a genetic algorithm whose
// repair step is guided by the LP-relaxation dual prices.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "broad/network.hpp"
#include "broad/rng.hpp"

namespace broad {

struct KnapsackInstance {
  std::vector<double> weights_bandwidth;  // Hz per user
  std::vector<double> weights_rate;       // bit/s per user
  double capacity_bandwidth = 0;          // Hz
  double capacity_rate = 0;               // bit/s

  std::size_t size() const { return weights_bandwidth.size(); }
  // Throws std::invalid_argument on mismatched lengths or non-positive entries.
  void validate() const;
};

struct GaConfig {
  std::size_t population_size = 40;
  std::size_t offspring_per_generation = 40;
  std::size_t mutation_flips = 2;
  std::uint64_t rng_seed = 1;
  // Safety net only; the search stops as soon as a generation fails to improve.
  std::size_t max_generations = 1000;
};

struct DualPrices {
  double rate = 0;       // price per bit/s of backhaul capacity
  double bandwidth = 0;  // price per Hz of access bandwidth
};

struct LpRelaxation {
  DualPrices duals;
  std::vector<double> primal;  // fractional z, at most two non-integral entries
  double objective = 0;
};

struct GaResult {
  Selection best;
  std::size_t generations = 0;
  std::vector<std::size_t> best_count_history;  // f after init and after each generation
};

bool is_feasible(const Selection& z, const KnapsackInstance& inst);
double selection_bandwidth(const Selection& z, const KnapsackInstance& inst);
double selection_rate(const Selection& z, const KnapsackInstance& inst);

// Exact optimum of the LP relaxation with its two coupling-constraint duals.
LpRelaxation solve_lp_relaxation(const KnapsackInstance& inst);
inline DualPrices solve_lp_dual(const KnapsackInstance& inst) { return solve_lp_relaxation(inst).duals; }

// zeta_i = 2 / (l1 * phi_i + l2 * b_i). Throws when both prices are zero.
double utility_ratio(std::size_t i, const DualPrices& duals, const KnapsackInstance& inst);

Selection repair(Selection z, const KnapsackInstance& inst, const DualPrices& duals);
// Adds unselected users, cheapest at the dual prices first, while both
// capacities still hold. Applied to every offspring after repair.
Selection greedy_fill(Selection z, const KnapsackInstance& inst, const DualPrices& duals);

Selection crossover(const Selection& parent1, const Selection& parent2, Rng& rng);
Selection mutate(Selection z, std::size_t flips, Rng& rng);

GaResult run_ga_detailed(const KnapsackInstance& inst, const GaConfig& cfg);
inline Selection run_ga(const KnapsackInstance& inst, const GaConfig& cfg) {
  return run_ga_detailed(inst, cfg).best;
}

// Exhaustive optimum for at most 24 users; ties prefer the smaller total
// bandwidth, then the lexicographically smaller selection.
Selection brute_force(const KnapsackInstance& inst);

// Builds the access-control instance for a DBS position: per-user required
// bandwidth at that position, the users' rates, B and the backhaul rate.
KnapsackInstance make_access_instance(const Network& net, const Position3D& dbs);

}  // namespace broad

#endif  // BROAD_KNAPSACK_GA_HPP
