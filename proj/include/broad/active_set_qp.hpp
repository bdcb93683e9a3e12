#ifndef BROAD_ACTIVE_SET_QP_HPP
#define BROAD_ACTIVE_SET_QP_HPP

// Dense strictly convex QP with inequality constraints
//
//   minimize   1/2 x' H x + g' x
//   subject to A x + c >= 0
//
// solved by the Goldfarb-Idnani dual active-set method. It starts from the
// unconstrained minimizer, so no feasible starting point is needed, and an
// empty feasible set is detected when a violated constraint can be neither
// reached nor traded against an active one.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace broad {

template <typename Scalar>
struct QuadraticProgram {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Matrix hessian;
  Vector gradient;
  Matrix constraint_normals;  // one row per constraint
  Vector constraint_offsets;
};

enum class QpStatus { kOptimal, kInfeasible, kIterationLimit, kNotPositiveDefinite };

template <typename Scalar>
struct QpSolution {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  QpStatus status = QpStatus::kOptimal;
  Vector x;
  Vector multipliers;
  std::vector<int> active;
  int iterations = 0;

  bool ok() const { return status == QpStatus::kOptimal; }
};

template <typename Scalar>
QpSolution<Scalar> active_set_solve(const QuadraticProgram<Scalar>& qp, int max_iterations = 100) {
  using Matrix = typename QuadraticProgram<Scalar>::Matrix;
  using Vector = typename QuadraticProgram<Scalar>::Vector;
  const Eigen::Index n = qp.hessian.rows();
  const Eigen::Index m = qp.constraint_normals.rows();
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  QpSolution<Scalar> sol;
  sol.multipliers = Vector::Zero(m);

  Eigen::LLT<Matrix> llt(qp.hessian);
  if (llt.info() != Eigen::Success) {
    sol.status = QpStatus::kNotPositiveDefinite;
    sol.x = Vector::Zero(n);
    return sol;
  }
  // J0 = L^{-T}, so J0 J0' = H^{-1}.
  const Matrix j0 = llt.matrixL().solve(Matrix::Identity(n, n)).transpose();
  Vector x = -llt.solve(qp.gradient);

  std::vector<int> active;
  std::vector<Scalar> u;  // multipliers of the active constraints

  auto slack = [&](Eigen::Index j) { return qp.constraint_normals.row(j).dot(x) + qp.constraint_offsets(j); };
  auto row_scale = [&](Eigen::Index j) {
    return Scalar(1) + std::abs(qp.constraint_offsets(j)) + qp.constraint_normals.row(j).norm() * x.norm();
  };

  // J and R for the current active set: J' N = [R; 0] with N the active normals.
  Matrix j = j0;
  Matrix r;
  auto refactor = [&] {
    const Eigen::Index k = static_cast<Eigen::Index>(active.size());
    if (k == 0) {
      j = j0;
      r.resize(0, 0);
      return;
    }
    Matrix normals(n, k);
    for (Eigen::Index a = 0; a < k; ++a) normals.col(a) = qp.constraint_normals.row(active[a]).transpose();
    Eigen::HouseholderQR<Matrix> qr(j0.transpose() * normals);
    const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    j = j0 * q;
    r = qr.matrixQR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  };

  int iter = 0;
  while (true) {
    // Most violated inactive constraint.
    Eigen::Index p = -1;
    Scalar worst = 0;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (std::find(active.begin(), active.end(), static_cast<int>(c)) != active.end()) continue;
      const Scalar s = slack(c);
      if (s < -Scalar(1e3) * eps * row_scale(c) && s < worst) {
        worst = s;
        p = c;
      }
    }
    if (p < 0) break;

    const Vector np = qp.constraint_normals.row(p).transpose();
    Scalar up = 0;
    bool added = false;
    while (!added) {
      if (++iter > max_iterations) {
        sol.status = QpStatus::kIterationLimit;
        sol.x = x;
        sol.iterations = iter;
        return sol;
      }
      refactor();
      const Eigen::Index k = static_cast<Eigen::Index>(active.size());
      const Vector d = j.transpose() * np;
      const Vector z = j.rightCols(n - k) * d.tail(n - k);
      Vector rr(k);
      if (k > 0) rr = r.template triangularView<Eigen::Upper>().solve(d.head(k));

      // Partial step: largest dual step before an active multiplier hits zero.
      Scalar t1 = inf;
      Eigen::Index drop = -1;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (rr(a) > 0) {
          const Scalar ratio = u[a] / rr(a);
          if (ratio < t1) {
            t1 = ratio;
            drop = a;
          }
        }
      }
      // Full step: primal step that makes constraint p tight.
      Scalar t2 = inf;
      const Scalar curvature = z.dot(np);
      if (z.norm() > Scalar(1e3) * eps * np.norm() * j0.norm() && curvature > 0) {
        t2 = -slack(p) / curvature;
      }

      if (t1 == inf && t2 == inf) {
        sol.status = QpStatus::kInfeasible;
        sol.x = x;
        sol.iterations = iter;
        return sol;
      }
      const Scalar t = std::min(t1, t2);
      if (t2 != inf) x += t * z;
      for (Eigen::Index a = 0; a < k; ++a) u[a] -= t * rr(a);
      up += t;

      if (t2 <= t1) {
        active.push_back(static_cast<int>(p));
        u.push_back(up);
        added = true;
      } else {
        active.erase(active.begin() + drop);
        u.erase(u.begin() + drop);
      }
    }
  }

  sol.status = QpStatus::kOptimal;
  sol.x = x;
  for (std::size_t a = 0; a < active.size(); ++a) {
    sol.multipliers(active[a]) = std::max(Scalar(0), u[a]);
  }
  sol.active = active;
  sol.iterations = iter;
  return sol;
}

}  // namespace broad

#endif  // BROAD_ACTIVE_SET_QP_HPP
