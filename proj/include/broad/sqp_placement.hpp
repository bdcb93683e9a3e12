#ifndef BROAD_SQP_PLACEMENT_HPP
#define BROAD_SQP_PLACEMENT_HPP

// DBS placement for a fixed satisfied set: minimize the path utilization
// max(backhaul, access) over (x, y, h) with an epigraph variable varsigma,
// using SQP with active-set QP subproblems and damped BFGS updates.
//
// Solver coordinates: u = (x, y, h, varsigma) with x, y, h in kilometers.
// Lengths are rescaled so that an identity initial Hessian is well matched to
// the curvature of the utilization surfaces.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

#include "broad/active_set_qp.hpp"
#include "broad/network.hpp"

namespace broad {

inline constexpr double kMetersPerSolverUnit = 1000.0;

using Vector4 = Eigen::Vector4d;
using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix4 = Eigen::Matrix4d;
using Matrix54 = Eigen::Matrix<double, 5, 4>;

struct UtilizationPair {
  double backhaul = 0;
  double access = 0;
  double max() const { return backhaul > access ? backhaul : access; }
};

struct PlacementIterate {
  Vector4 u = Vector4::Zero();
  Vector5 multipliers = Vector5::Zero();
  Matrix4 hessian = Matrix4::Identity();
};

// Rows in order: backhaul epigraph, access epigraph, varsigma <= 1,
// h <= h_max, h >= h_min. Each row reads normal' du + offset >= 0.
struct QpSubproblem {
  Matrix4 hessian = Matrix4::Identity();
  Vector4 gradient = Vector4::Zero();
  Matrix54 constraint_normals = Matrix54::Zero();
  Vector5 constraint_offsets = Vector5::Zero();
};

enum class SqpStatus { kConverged, kIterationLimit, kLineSearchStalled, kQpFailure };

struct SqpTraceRecord {
  std::size_t iteration = 0;
  Vector4 u = Vector4::Zero();
  double varsigma = 0;
  double merit = 0;
  double step_norm = 0;
  double min_hessian_eigenvalue = 0;
};

struct SqpOptions {
  double nu = 1e-5;
  std::size_t max_iterations = 200;
  std::size_t max_halvings = 20;
  double merit_penalty = 10.0;
  std::function<void(const SqpTraceRecord&)> trace;
};

struct SqpResult {
  Position3D position;
  UtilizationPair utilization;
  double varsigma = 0;  // equals utilization.max()
  SqpStatus status = SqpStatus::kConverged;
  std::size_t iterations = 0;
};

inline Position3D to_position(const Vector4& u) {
  return {u(0) * kMetersPerSolverUnit, u(1) * kMetersPerSolverUnit, u(2) * kMetersPerSolverUnit};
}

UtilizationPair path_utilization(const Position3D& dbs, const Selection& z, const Network& net);

Vector5 constraint_values(const Vector4& u, const Selection& z, const Network& net);

// Central differences; coordinate k uses step max(1e-4 |u_k|, 1e-6), i.e. at
// least 1 mm for the length coordinates.
template <typename Field>
Vector4 numerical_gradient(Field&& f, const Vector4& u) {
  Vector4 grad;
  for (int k = 0; k < 4; ++k) {
    const double step = std::max(1e-4 * std::abs(u(k)), 1e-6);
    Vector4 up = u;
    Vector4 down = u;
    up(k) += step;
    down(k) -= step;
    const double fu = f(up);
    const double fd = f(down);
    if (!std::isfinite(fu) || !std::isfinite(fd)) {
      throw std::domain_error("numerical_gradient: non-finite evaluation");
    }
    grad(k) = (fu - fd) / (up(k) - down(k));
  }
  return grad;
}

// Linearization of the placement problem at `state`. With `cap_row_enabled`
// false the varsigma <= 1 row is replaced by the trivially satisfied 0 >= -1.
QpSubproblem build_qp(const PlacementIterate& state, const Selection& z, const Network& net,
                      bool cap_row_enabled = true);

QpSolution<double> active_set_solve(const QpSubproblem& qp);

// BFGS update of the Lagrangian Hessian approximation with Powell damping
// when q' du < 0.2 du' H du. A zero step returns H unchanged.
Matrix4 bfgs_update(const Matrix4& hessian, const Vector4& delta_u, const Vector4& grad_lagrangian_new,
                    const Vector4& grad_lagrangian_old);

// Gradient of the Lagrangian in solver coordinates given the utilization
// gradients at the point.
Vector4 lagrangian_gradient(const Vector5& multipliers, const Vector4& grad_backhaul, const Vector4& grad_access);

SqpResult sqp_solve(const Position3D& start, const Selection& z, const Network& net, const SqpOptions& options = {});

}  // namespace broad

#endif  // BROAD_SQP_PLACEMENT_HPP
