#include <cmath>

#include "maxcert/mpc.hpp"

namespace maxcert {

namespace {

Matrix riccati_step(const Matrix& A, const Matrix& B, const Matrix& Q,
                    const Matrix& R, const Matrix& P) {
  const Matrix BtP = B.transpose() * P;
  const Matrix gain = (R + BtP * B).ldlt().solve(BtP * A);
  Matrix next = Q + A.transpose() * P * A - A.transpose() * BtP.transpose() * gain;
  return 0.5 * (next + next.transpose());
}

}  // namespace

Matrix dare(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols()) {
    throw std::invalid_argument("dare: inconsistent dimensions");
  }
  Matrix P = Q;
  for (int it = 0; it < 100000; ++it) {
    Matrix next = riccati_step(A, B, Q, R, P);
    if (!next.allFinite()) break;
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    if (change <= 1e-13 * std::max(1.0, P.cwiseAbs().maxCoeff())) return P;
  }
  throw ModelError("dare: fixed-point iteration did not converge");
}

double dare_residual(const Matrix& A, const Matrix& B, const Matrix& Q,
                     const Matrix& R, const Matrix& P) {
  return (riccati_step(A, B, Q, R, P) - P).cwiseAbs().maxCoeff();
}

Matrix lqr_gain(const Matrix& A, const Matrix& B, const Matrix& R,
                const Matrix& P) {
  const Matrix BtP = B.transpose() * P;
  return -(R + BtP * B).ldlt().solve(BtP * A);
}

Polytope max_output_admissible_set(const Matrix& A_cl,
                                   const Polytope& constraints,
                                   int max_steps) {
  const Eigen::Index n = A_cl.rows();
  if (A_cl.cols() != n || constraints.dim() != n) {
    throw std::invalid_argument("max_output_admissible_set: dimensions");
  }
  Eigen::EigenSolver<Matrix> eig(A_cl, false);
  if (eig.eigenvalues().cwiseAbs().maxCoeff() >= 1.0) {
    throw ModelError("max_output_admissible_set: closed loop is not Schur stable");
  }
  Polytope O = constraints;
  Matrix power = A_cl;
  for (int t = 1; t <= max_steps; ++t) {
    const Matrix rows = constraints.A * power;
    bool all_redundant = true;
    for (int i = 0; i < rows.rows(); ++i) {
      std::optional<double> s = support(O, rows.row(i).transpose());
      if (!s) throw EmptyPolytopeError("max_output_admissible_set: empty set");
      const double slack = 1e-9 * (1.0 + std::abs(constraints.b(i)));
      if (*s > constraints.b(i) + slack) {
        all_redundant = false;
        break;
      }
    }
    if (all_redundant) return remove_redundant(O);
    O = O.intersect(Polytope(rows, constraints.b));
    power = A_cl * power;
  }
  throw ModelError("max_output_admissible_set: iteration cap exceeded");
}

}  // namespace maxcert
