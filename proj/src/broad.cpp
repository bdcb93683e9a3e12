#include "broad/broad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace broad {

namespace {

constexpr double kSlack = 1e-9;

std::string describe(const char* what, double value, double limit) {
  std::ostringstream os;
  os.precision(10);
  os << what << ": " << value << " vs limit " << limit;
  return os.str();
}

}  // namespace

BroadPlan make_plan(const Network& net, const Position3D& dbs, Selection z, std::size_t iterations) {
  BroadPlan plan;
  plan.dbs_position = dbs;
  plan.per_user_bandwidth.assign(net.users.size(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i]) plan.per_user_bandwidth[i] = required_bandwidth(dbs, net.users[i], net.config.access);
  }
  plan.satisfied_count = selected_count(z);
  plan.utilization = path_utilization(dbs, z, net);
  plan.z = std::move(z);
  plan.iterations = iterations;
  return plan;
}

BroadPlan solve_access_at(const Network& net, const Position3D& dbs, const GaConfig& ga) {
  if (net.users.empty()) return make_plan(net, dbs, {});
  return make_plan(net, dbs, run_ga(make_access_instance(net, dbs), ga));
}

BroadPlan run_broad(const Network& net, const Position3D& initial, const BroadOptions& options) {
  const auto& alt = net.config.altitude;
  if (initial.h < alt.h_min || initial.h > alt.h_max) {
    throw std::invalid_argument("initial DBS altitude is outside the altitude bounds");
  }

  auto access_control = [&](const Position3D& dbs, std::size_t iteration) {
    GaConfig ga = options.ga;
    ga.rng_seed = options.ga.rng_seed + iteration;
    return solve_access_at(net, dbs, ga);
  };

  std::size_t solves = 0;
  BroadPlan current = access_control(initial, solves++);
  // Snapshot of the best iterate (g_opt and its position and selection).
  BroadPlan best = current;
  std::size_t best_count = 0;
  auto log = [&](const BroadPlan& plan) {
    if (!options.iteration_log) return;
    BroadIterationRecord rec;
    rec.iteration = solves;
    rec.count = plan.satisfied_count;
    rec.best_count = std::max(best_count, plan.satisfied_count);
    rec.position = plan.dbs_position;
    rec.utilization = plan.utilization;
    options.iteration_log(rec);
  };
  log(current);

  while (current.satisfied_count > best_count) {
    best_count = current.satisfied_count;
    best = current;
    if (solves >= options.max_outer_iterations) break;
    try {
      const SqpResult placed = sqp_solve(current.dbs_position, current.z, net, options.sqp);
      current = access_control(placed.position, solves++);
    } catch (const std::exception& e) {
      best.iterations = solves;
      throw BroadError(e.what(), best);
    }
    log(current);
  }
  best.iterations = solves;
  return best;
}

const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kSelectionShape:
      return "selection-shape";
    case ConstraintKind::kBandwidthBudget:
      return "bandwidth-budget";
    case ConstraintKind::kBackhaulCapacity:
      return "backhaul-capacity";
    case ConstraintKind::kRateRequirement:
      return "rate-requirement";
    case ConstraintKind::kAltitudeBounds:
      return "altitude-bounds";
    case ConstraintKind::kCountMismatch:
      return "count-mismatch";
  }
  return "unknown";
}

std::vector<Violation> validate_plan(const BroadPlan& plan, const Network& net) {
  std::vector<Violation> out;
  const std::size_t n = net.users.size();
  if (plan.z.size() != n || plan.per_user_bandwidth.size() != n) {
    out.push_back({ConstraintKind::kSelectionShape, "selection or bandwidth list does not match the user count"});
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (plan.z[i] > 1) {
      out.push_back({ConstraintKind::kSelectionShape, "selection entry " + std::to_string(i) + " is not binary"});
      return out;
    }
  }
  if (plan.satisfied_count != selected_count(plan.z)) {
    out.push_back({ConstraintKind::kCountMismatch, "satisfied_count differs from the number of selected users"});
  }

  const auto& access = net.config.access;
  const Position3D& dbs = plan.dbs_position;
  double bandwidth = 0;
  double demand = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!plan.z[i]) continue;
    const double b = plan.per_user_bandwidth[i];
    bandwidth += b;
    const double rate = access_rate(b, average_pathloss_db(dbs, net.users[i], access), access);
    demand += net.users[i].phi;
    if (rate < net.users[i].phi * (1 - kSlack)) {
      out.push_back({ConstraintKind::kRateRequirement,
                     describe(("user " + std::to_string(i) + " access rate").c_str(), rate, net.users[i].phi)});
    }
  }
  if (bandwidth > access.bandwidth_hz * (1 + kSlack)) {
    out.push_back({ConstraintKind::kBandwidthBudget, describe("allocated bandwidth", bandwidth, access.bandwidth_hz)});
  }
  // The backhaul carries the selected users' demands.
  if (demand > 0) {
    const double capacity = fso_rate(net.mbs, dbs, net.config.fso);
    if (demand > capacity * (1 + kSlack)) {
      out.push_back({ConstraintKind::kBackhaulCapacity, describe("selected demand", demand, capacity)});
    }
  }
  const auto& alt = net.config.altitude;
  if (dbs.h < alt.h_min * (1 - kSlack) || dbs.h > alt.h_max * (1 + kSlack)) {
    out.push_back({ConstraintKind::kAltitudeBounds, describe("DBS altitude", dbs.h, dbs.h < alt.h_min ? alt.h_min : alt.h_max)});
  }
  return out;
}

}  // namespace broad
