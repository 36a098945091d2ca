#include "maxcert/optim.hpp"

#include <cmath>

namespace maxcert {

LinearProgram LinearProgram::free_variables(int n) {
  LinearProgram lp;
  lp.cost = Vector::Zero(n);
  lp.A = Matrix::Zero(0, n);
  lp.b = Vector::Zero(0);
  lp.C = Matrix::Zero(0, n);
  lp.d = Vector::Zero(0);
  lp.lower = Vector::Constant(n, -kInf);
  lp.upper = Vector::Constant(n, kInf);
  return lp;
}

namespace {

void append_row(Matrix& M, Vector& rhs, const Eigen::Ref<const Vector>& row,
                double value) {
  if (row.size() != M.cols()) {
    throw std::invalid_argument("row length does not match variable count");
  }
  M.conservativeResize(M.rows() + 1, Eigen::NoChange);
  M.row(M.rows() - 1) = row.transpose();
  rhs.conservativeResize(rhs.size() + 1);
  rhs(rhs.size() - 1) = value;
}

}  // namespace

void LinearProgram::add_inequality(const Eigen::Ref<const Vector>& row,
                                   double rhs) {
  append_row(A, b, row, rhs);
}

void LinearProgram::add_equality(const Eigen::Ref<const Vector>& row,
                                 double rhs) {
  append_row(C, d, row, rhs);
}

void LinearProgram::validate() const {
  const Eigen::Index n = cost.size();
  if (A.cols() != n || C.cols() != n || lower.size() != n ||
      upper.size() != n) {
    throw std::invalid_argument("LinearProgram: inconsistent dimensions");
  }
  if (A.rows() != b.size() || C.rows() != d.size()) {
    throw std::invalid_argument("LinearProgram: row/rhs count mismatch");
  }
  if (!b.allFinite() || !d.allFinite() || !A.allFinite() || !C.allFinite() ||
      !cost.allFinite()) {
    throw std::invalid_argument("LinearProgram: non-finite data");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) == kInf ||
        upper(j) == -kInf) {
      throw std::invalid_argument("LinearProgram: invalid variable bound");
    }
  }
}

void QuadraticProgram::validate() const {
  const Eigen::Index n = linear.size();
  if (hessian.rows() != n || hessian.cols() != n || A.cols() != n ||
      C.cols() != n || A.rows() != b.size() || C.rows() != d.size()) {
    throw std::invalid_argument("QuadraticProgram: inconsistent dimensions");
  }
  if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("QuadraticProgram: hessian not symmetric");
  }
}

void MilpProblem::validate() const {
  base.validate();
  for (int j : binaries) {
    if (j < 0 || j >= base.num_vars()) {
      throw std::invalid_argument("MilpProblem: binary index out of range");
    }
    if (base.lower(j) < -1e-12 && base.lower(j) != -kInf) {
      throw std::invalid_argument("MilpProblem: binary lower bound below 0");
    }
    if (base.upper(j) > 1 + 1e-12 && base.upper(j) != kInf) {
      throw std::invalid_argument("MilpProblem: binary upper bound above 1");
    }
  }
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Unbounded:
      return "unbounded";
    case SolveStatus::GapLimit:
      return "gap-limit";
  }
  return "unknown";
}

}  // namespace maxcert
