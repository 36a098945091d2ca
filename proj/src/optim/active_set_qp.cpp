#include <algorithm>
#include <cmath>
#include <numeric>

#include "maxcert/optim.hpp"

namespace maxcert {
namespace {

struct EqpSolution {
  Vector step;
  Vector mult_working;
  Vector mult_eq;
};

// Solves min ½pᵀHp + gᵀp s.t. A_W p = 0, C p = 0 through the full KKT system.
EqpSolution solve_eqp(const QuadraticProgram& qp, const Vector& grad,
                      const std::vector<int>& working) {
  const int n = qp.num_vars();
  const int w = static_cast<int>(working.size());
  const int e = static_cast<int>(qp.C.rows());
  const int k = n + w + e;
  Matrix kkt = Matrix::Zero(k, k);
  kkt.topLeftCorner(n, n) = qp.hessian;
  for (int i = 0; i < w; ++i) {
    kkt.block(n + i, 0, 1, n) = qp.A.row(working[i]);
    kkt.block(0, n + i, n, 1) = qp.A.row(working[i]).transpose();
  }
  if (e > 0) {
    kkt.block(n + w, 0, e, n) = qp.C;
    kkt.block(0, n + w, n, e) = qp.C.transpose();
  }
  Vector rhs = Vector::Zero(k);
  rhs.head(n) = -grad;
  Eigen::FullPivLU<Matrix> lu(kkt);
  if (lu.rank() < k) {
    throw NumericalError("active-set QP: singular KKT system");
  }
  Vector sol = lu.solve(rhs);
  return {sol.head(n), sol.segment(n, w), sol.tail(e)};
}

}  // namespace

SolveResult solve_qp(const QuadraticProgram& qp,
                     const std::vector<int>& working_set) {
  qp.validate();
  const int n = qp.num_vars();
  const int rows = static_cast<int>(qp.A.rows());
  Eigen::LLT<Matrix> llt(qp.hessian);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("active-set QP: hessian not positive definite");
  }
  constexpr double tol = 1e-9;
  auto feasible = [&](const Vector& x) {
    if (rows > 0 &&
        ((qp.A * x - qp.b).array() > tol * (1.0 + qp.b.array().abs()))
            .any()) {
      return false;
    }
    if (qp.C.rows() > 0 &&
        ((qp.C * x - qp.d).array().abs() > tol * (1.0 + qp.d.array().abs()))
            .any()) {
      return false;
    }
    return true;
  };

  // Starting point: warm working set, unconstrained minimizer, then Phase 1.
  Vector x;
  std::vector<int> working;
  bool started = false;
  if (!working_set.empty()) {
    std::vector<int> seed = working_set;
    std::sort(seed.begin(), seed.end());
    seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
    try {
      Matrix Aw(seed.size() + qp.C.rows(), n);
      Vector bw(seed.size() + qp.C.rows());
      for (size_t i = 0; i < seed.size(); ++i) {
        Aw.row(i) = qp.A.row(seed[i]);
        bw(i) = qp.b(seed[i]);
      }
      if (qp.C.rows() > 0) {
        Aw.bottomRows(qp.C.rows()) = qp.C;
        bw.tail(qp.C.rows()) = qp.d;
      }
      // Least-norm point on the seed equalities, then the minimizer over
      // that affine set.
      Vector x0 = Aw.completeOrthogonalDecomposition().solve(bw);
      if ((Aw * x0 - bw).cwiseAbs().maxCoeff() < 1e-9) {
        Vector g0 = qp.hessian * x0 + qp.linear;
        EqpSolution s = solve_eqp(qp, g0, seed);
        Vector cand = x0 + s.step;
        if (feasible(cand)) {
          x = cand;
          working = seed;
          started = true;
        }
      }
    } catch (const NumericalError&) {
      started = false;
    }
  }
  if (!started) {
    if (qp.C.rows() == 0) {
      Vector free_min = llt.solve(-qp.linear);
      if (feasible(free_min)) {
        x = free_min;
        started = true;
      }
    }
  }
  if (!started) {
    LinearProgram phase1 = LinearProgram::free_variables(n);
    phase1.A = qp.A;
    phase1.b = qp.b;
    phase1.C = qp.C;
    phase1.d = qp.d;
    SolveResult p1 = solve_lp(phase1);
    if (p1.status != SolveStatus::Optimal) {
      SolveResult r;
      r.status = SolveStatus::Infeasible;
      return r;
    }
    x = p1.point;
  }

  const long max_iter = 100 + 20L * (n + rows);
  SolveResult result;
  for (long iter = 0; iter < max_iter; ++iter) {
    Vector grad = qp.hessian * x + qp.linear;
    EqpSolution s = solve_eqp(qp, grad, working);
    if (s.step.norm() <= 1e-12 * (1.0 + x.norm())) {
      int drop = -1;
      double most_negative = -1e-10;
      for (size_t i = 0; i < working.size(); ++i) {
        if (s.mult_working(i) < most_negative) {
          most_negative = s.mult_working(i);
          drop = static_cast<int>(i);
        }
      }
      if (drop < 0) {
        result.status = SolveStatus::Optimal;
        result.point = x;
        result.value = 0.5 * x.dot(qp.hessian * x) + qp.linear.dot(x);
        result.dual_ineq = Vector::Zero(rows);
        for (size_t i = 0; i < working.size(); ++i) {
          result.dual_ineq(working[i]) = std::max(0.0, s.mult_working(i));
        }
        result.dual_eq = s.mult_eq;
        result.active = working;
        std::sort(result.active.begin(), result.active.end());
        result.iterations = iter;
        return result;
      }
      working.erase(working.begin() + drop);
      continue;
    }
    double step = 1.0;
    int block = -1;
    for (int i = 0; i < rows; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) {
        continue;
      }
      const double ap = qp.A.row(i).dot(s.step);
      if (ap <= 1e-14) continue;
      const double room = std::max(0.0, qp.b(i) - qp.A.row(i).dot(x));
      const double lim = room / ap;
      if (lim < step) {
        step = lim;
        block = i;
      }
    }
    x += step * s.step;
    if (block >= 0) working.push_back(block);
  }
  throw NumericalError("active-set QP: iteration limit exceeded");
}

}  // namespace maxcert
