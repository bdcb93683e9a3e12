#ifndef BROAD_BROAD_HPP
#define BROAD_BROAD_HPP

// Backhaul-aware bandwidth allocation and DBS placement: alternate user
// access control (GA) and placement (SQP) until the satisfied-user count
// stops increasing, and report the best plan seen.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "broad/knapsack_ga.hpp"
#include "broad/network.hpp"
#include "broad/sqp_placement.hpp"

namespace broad {

struct BroadPlan {
  Position3D dbs_position;
  Selection z;
  std::vector<double> per_user_bandwidth;  // Hz; zero for unselected users
  std::size_t satisfied_count = 0;
  UtilizationPair utilization;
  std::size_t iterations = 0;
};

struct BroadIterationRecord {
  std::size_t iteration = 0;
  std::size_t count = 0;
  std::size_t best_count = 0;
  Position3D position;
  UtilizationPair utilization;
};

struct BroadOptions {
  GaConfig ga;
  SqpOptions sqp;
  std::size_t max_outer_iterations = 25;
  std::function<void(const BroadIterationRecord&)> iteration_log;
};

class BroadError : public std::runtime_error {
 public:
  BroadError(const std::string& what, BroadPlan best) : std::runtime_error(what), best_(std::move(best)) {}
  const BroadPlan& best_plan() const { return best_; }

 private:
  BroadPlan best_;
};

// Plan for a given position and selection with exact per-user bandwidth.
BroadPlan make_plan(const Network& net, const Position3D& dbs, Selection z, std::size_t iterations = 1);

// Access control alone at a fixed position.
BroadPlan solve_access_at(const Network& net, const Position3D& dbs, const GaConfig& ga);

BroadPlan run_broad(const Network& net, const Position3D& initial, const BroadOptions& options = {});

enum class ConstraintKind {
  kSelectionShape,
  kBandwidthBudget,
  kBackhaulCapacity,
  kRateRequirement,
  kAltitudeBounds,
  kCountMismatch,
};

struct Violation {
  ConstraintKind kind;
  std::string message;
};

const char* to_string(ConstraintKind kind);

// Audits a plan against every constraint of the joint problem with 1e-9
// relative slack. Empty result means the plan is valid.
std::vector<Violation> validate_plan(const BroadPlan& plan, const Network& net);

}  // namespace broad

#endif  // BROAD_BROAD_HPP
