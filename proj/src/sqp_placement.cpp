#include "broad/sqp_placement.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace broad {

namespace {

const Vector4 kVarsigmaAxis(0, 0, 0, 1);
const Vector4 kAltitudeAxis(0, 0, 1, 0);

double selected_rate(const Selection& z, const Network& net) {
  double total = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i]) total += net.users[i].phi;
  }
  return total;
}

struct Linearization {
  UtilizationPair utilization;
  Vector4 grad_backhaul;
  Vector4 grad_access;
};

class PlacementModel {
 public:
  PlacementModel(const Selection& z, const Network& net) : z_(z), net_(net), demand_(selected_rate(z, net)) {
    if (z.size() != net.users.size()) {
      throw std::invalid_argument("selection length does not match the user count");
    }
  }

  double backhaul(const Vector4& u) const {
    if (demand_ == 0) return 0;
    return demand_ / fso_rate(net_.mbs, to_position(u), net_.config.fso);
  }

  double access(const Vector4& u) const {
    const Position3D dbs = to_position(u);
    double total = 0;
    for (std::size_t i = 0; i < z_.size(); ++i) {
      if (z_[i]) total += required_bandwidth(dbs, net_.users[i], net_.config.access);
    }
    return total / net_.config.access.bandwidth_hz;
  }

  UtilizationPair utilization(const Vector4& u) const { return {backhaul(u), access(u)}; }

  Linearization linearize(const Vector4& u) const {
    Linearization lin;
    lin.utilization = utilization(u);
    lin.grad_backhaul = numerical_gradient([this](const Vector4& v) { return backhaul(v); }, u);
    lin.grad_access = numerical_gradient([this](const Vector4& v) { return access(v); }, u);
    return lin;
  }

  double h_min() const { return net_.config.altitude.h_min / kMetersPerSolverUnit; }
  double h_max() const { return net_.config.altitude.h_max / kMetersPerSolverUnit; }

 private:
  const Selection& z_;
  const Network& net_;
  double demand_;
};

QpSubproblem assemble_qp(const Matrix4& hessian, const Vector4& u, const Linearization& lin, double h_min,
                         double h_max, bool cap_row_enabled) {
  QpSubproblem qp;
  qp.hessian = hessian;
  qp.gradient = kVarsigmaAxis;
  const double varsigma = u(3);
  qp.constraint_normals.row(0) = (kVarsigmaAxis - lin.grad_backhaul).transpose();
  qp.constraint_offsets(0) = varsigma - lin.utilization.backhaul;
  qp.constraint_normals.row(1) = (kVarsigmaAxis - lin.grad_access).transpose();
  qp.constraint_offsets(1) = varsigma - lin.utilization.access;
  if (cap_row_enabled) {
    qp.constraint_normals.row(2) = -kVarsigmaAxis.transpose();
    qp.constraint_offsets(2) = 1.0 - varsigma;
  } else {
    qp.constraint_normals.row(2).setZero();
    qp.constraint_offsets(2) = 1.0;
  }
  qp.constraint_normals.row(3) = -kAltitudeAxis.transpose();
  qp.constraint_offsets(3) = h_max - u(2);
  qp.constraint_normals.row(4) = kAltitudeAxis.transpose();
  qp.constraint_offsets(4) = u(2) - h_min;
  return qp;
}

}  // namespace

UtilizationPair path_utilization(const Position3D& dbs, const Selection& z, const Network& net) {
  if (z.size() != net.users.size()) {
    throw std::invalid_argument("selection length does not match the user count");
  }
  const double backhaul_capacity = fso_rate(net.mbs, dbs, net.config.fso);
  if (!(backhaul_capacity > 0)) {
    throw std::domain_error("backhaul capacity is zero at this position");
  }
  UtilizationPair out;
  double bandwidth = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!z[i]) continue;
    out.backhaul += net.users[i].phi;
    bandwidth += required_bandwidth(dbs, net.users[i], net.config.access);
  }
  out.backhaul /= backhaul_capacity;
  out.access = bandwidth / net.config.access.bandwidth_hz;
  return out;
}

Vector5 constraint_values(const Vector4& u, const Selection& z, const Network& net) {
  const UtilizationPair util = path_utilization(to_position(u), z, net);
  const double varsigma = u(3);
  Vector5 c;
  c << varsigma - util.backhaul, varsigma - util.access, 1.0 - varsigma,
      net.config.altitude.h_max / kMetersPerSolverUnit - u(2), u(2) - net.config.altitude.h_min / kMetersPerSolverUnit;
  return c;
}

QpSubproblem build_qp(const PlacementIterate& state, const Selection& z, const Network& net, bool cap_row_enabled) {
  const PlacementModel model(z, net);
  return assemble_qp(state.hessian, state.u, model.linearize(state.u), model.h_min(), model.h_max(), cap_row_enabled);
}

QpSolution<double> active_set_solve(const QpSubproblem& qp) {
  QuadraticProgram<double> generic;
  generic.hessian = qp.hessian;
  generic.gradient = qp.gradient;
  generic.constraint_normals = qp.constraint_normals;
  generic.constraint_offsets = qp.constraint_offsets;
  return active_set_solve(generic);
}

Matrix4 bfgs_update(const Matrix4& hessian, const Vector4& delta_u, const Vector4& grad_lagrangian_new,
                    const Vector4& grad_lagrangian_old) {
  const Vector4 hs = hessian * delta_u;
  const double shs = delta_u.dot(hs);
  if (!(shs > 0)) return hessian;
  Vector4 q = grad_lagrangian_new - grad_lagrangian_old;
  double sq = delta_u.dot(q);
  if (sq < 0.2 * shs) {
    const double theta = 0.8 * shs / (shs - sq);
    q = theta * q + (1.0 - theta) * hs;
    sq = delta_u.dot(q);
  }
  Matrix4 updated = hessian + q * q.transpose() / sq - hs * hs.transpose() / shs;
  return 0.5 * (updated + updated.transpose());
}

Vector4 lagrangian_gradient(const Vector5& m, const Vector4& grad_backhaul, const Vector4& grad_access) {
  return kVarsigmaAxis - m(0) * (kVarsigmaAxis - grad_backhaul) - m(1) * (kVarsigmaAxis - grad_access) +
         m(2) * kVarsigmaAxis + m(3) * kAltitudeAxis - m(4) * kAltitudeAxis;
}

SqpResult sqp_solve(const Position3D& start, const Selection& z, const Network& net, const SqpOptions& options) {
  const PlacementModel model(z, net);
  const double h_lo = model.h_min();
  const double h_hi = model.h_max();

  auto merit = [&](const UtilizationPair& util) {
    const double varsigma = util.max();
    return varsigma + options.merit_penalty * std::max(0.0, varsigma - 1.0);
  };

  PlacementIterate state;
  state.u << start.x / kMetersPerSolverUnit, start.y / kMetersPerSolverUnit,
      std::clamp(start.h / kMetersPerSolverUnit, h_lo, h_hi), 0.0;
  Linearization lin = model.linearize(state.u);
  state.u(3) = lin.utilization.max();
  const Vector4 projected_start = state.u;

  SqpResult result;
  result.status = SqpStatus::kIterationLimit;
  std::size_t t = 0;
  for (; t < options.max_iterations; ++t) {
    const bool cap_enabled = state.u(3) <= 1.0;
    QpSubproblem qp = assemble_qp(state.hessian, state.u, lin, h_lo, h_hi, cap_enabled);
    QpSolution<double> step = active_set_solve(qp);
    if (!step.ok() && cap_enabled) {
      qp = assemble_qp(state.hessian, state.u, lin, h_lo, h_hi, false);
      step = active_set_solve(qp);
    }
    if (!step.ok()) {
      result.status = SqpStatus::kQpFailure;
      break;
    }
    const Vector4 du = step.x;
    const Vector5 m_next = step.multipliers;
    if (std::abs(du(3)) <= options.nu) {
      result.status = SqpStatus::kConverged;
      break;
    }

    // Backtracking on the l1 merit. varsigma is reset to the utilization
    // after each trial step, so only the penalty on varsigma <= 1 remains.
    const double merit_now = merit(lin.utilization);
    double alpha = 1.0;
    bool accepted = false;
    Vector4 trial;
    UtilizationPair trial_util;
    for (std::size_t k = 0; k <= options.max_halvings; ++k, alpha *= 0.5) {
      trial = state.u + alpha * du;
      trial(2) = std::clamp(trial(2), h_lo, h_hi);
      trial_util = model.utilization(trial);
      trial(3) = trial_util.max();
      if (merit(trial_util) <= merit_now + 1e-4 * alpha * std::min(du(3), 0.0)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.status = SqpStatus::kLineSearchStalled;
      break;
    }

    const Linearization next = model.linearize(trial);
    const Vector4 s = trial - state.u;
    state.hessian = bfgs_update(state.hessian, s, lagrangian_gradient(m_next, next.grad_backhaul, next.grad_access),
                                lagrangian_gradient(m_next, lin.grad_backhaul, lin.grad_access));
    state.u = trial;
    state.multipliers = m_next;
    lin = next;

    if (options.trace) {
      SqpTraceRecord rec;
      rec.iteration = t + 1;
      rec.u = state.u;
      rec.varsigma = state.u(3);
      rec.merit = merit(lin.utilization);
      rec.step_norm = s.norm();
      rec.min_hessian_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix4>(state.hessian).eigenvalues()(0);
      options.trace(rec);
    }
  }

  result.iterations = t;
  auto finish_at = [&](const Vector4& u) {
    result.position = to_position(u);
    result.position.h = std::clamp(result.position.h, net.config.altitude.h_min, net.config.altitude.h_max);
    result.utilization = path_utilization(result.position, z, net);
  };
  finish_at(state.u);
  const double final_value = result.utilization.max();
  finish_at(projected_start);
  const double start_value = result.utilization.max();
  if (final_value <= start_value) finish_at(state.u);
  result.varsigma = result.utilization.max();
  return result;
}

}  // namespace broad
