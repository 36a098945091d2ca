#include <cmath>

#include "maxcert/mpc.hpp"

namespace maxcert {

namespace {

bool positive_semidefinite(const Matrix& M, double floor) {
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= floor;
}

Matrix block_diag(const Matrix& M, int copies) {
  Matrix out = Matrix::Zero(M.rows() * copies, M.cols() * copies);
  for (int k = 0; k < copies; ++k) {
    out.block(k * M.rows(), k * M.cols(), M.rows(), M.cols()) = M;
  }
  return out;
}

void append_rows(Matrix& G, Vector& w, Matrix& S, const Matrix& g,
                 const Vector& rhs, const Matrix& s) {
  const Eigen::Index r0 = G.rows();
  G.conservativeResize(r0 + g.rows(), g.cols());
  w.conservativeResize(r0 + g.rows());
  S.conservativeResize(r0 + g.rows(), s.cols());
  G.bottomRows(g.rows()) = g;
  w.tail(g.rows()) = rhs;
  S.bottomRows(g.rows()) = s;
}

}  // namespace

void OcpSpec::validate() const {
  const int n = state_dim();
  const int m = input_dim();
  if (A.cols() != n || B.rows() != n || n < 1 || m < 1) {
    throw std::invalid_argument("OcpSpec: inconsistent A/B dimensions");
  }
  if (Q.rows() != n || Q.cols() != n || P.rows() != n || P.cols() != n ||
      R.rows() != m || R.cols() != m) {
    throw std::invalid_argument("OcpSpec: inconsistent weight dimensions");
  }
  if (N < 1) throw std::invalid_argument("OcpSpec: horizon must be ≥ 1");
  if (X.dim() != n || T.dim() != n || U.dim() != m) {
    throw std::invalid_argument("OcpSpec: constraint set dimensions");
  }
  X.validate();
  U.validate();
  T.validate();
  if (!positive_semidefinite(Q, -1e-10) || !positive_semidefinite(P, -1e-10)) {
    throw std::invalid_argument("OcpSpec: Q and P must be positive semidefinite");
  }
  if (!positive_semidefinite(R, 1e-12)) {
    throw std::invalid_argument("OcpSpec: R must be positive definite");
  }
  if (!contains_set(X, T, 1e-9)) {
    throw std::invalid_argument("OcpSpec: terminal set is not contained in X");
  }
}

ParametricQp condense(const OcpSpec& spec) {
  spec.validate();
  const int n = spec.state_dim();
  const int m = spec.input_dim();
  const int N = spec.N;
  const int nu = N * m;

  // Predictions x̂(κ) = Sx[κ] x + Su[κ] U for κ = 0..N.
  std::vector<Matrix> Sx(N + 1), Su(N + 1);
  Sx[0] = Matrix::Identity(n, n);
  Su[0] = Matrix::Zero(n, nu);
  for (int k = 1; k <= N; ++k) {
    Sx[k] = spec.A * Sx[k - 1];
    Su[k] = spec.A * Su[k - 1];
    Su[k].middleCols((k - 1) * m, m) += spec.B;
  }

  Matrix Sx_stack(N * n, n), Su_stack(N * n, nu);
  for (int k = 1; k <= N; ++k) {
    Sx_stack.middleRows((k - 1) * n, n) = Sx[k];
    Su_stack.middleRows((k - 1) * n, n) = Su[k];
  }
  Matrix Qbar = block_diag(spec.Q, N);
  Qbar.bottomRightCorner(n, n) = spec.P;
  const Matrix Rbar = block_diag(spec.R, N);

  ParametricQp qp;
  qp.input_dim = m;
  qp.H = 2.0 * (Su_stack.transpose() * Qbar * Su_stack + Rbar);
  qp.H = 0.5 * (qp.H + qp.H.transpose()).eval();
  qp.F = 2.0 * Sx_stack.transpose() * Qbar * Su_stack;
  if (Eigen::LLT<Matrix>(qp.H).info() != Eigen::Success) {
    throw ModelError("condense: reduced Hessian is not positive definite");
  }

  Matrix G(0, nu), S(0, n);
  Vector w(0);
  for (int k = 0; k < N; ++k) {
    const Matrix& Ax = spec.X.A;
    append_rows(G, w, S, Ax * Su[k], spec.X.b, -Ax * Sx[k]);
    Matrix gu = Matrix::Zero(spec.U.num_rows(), nu);
    gu.middleCols(k * m, m) = spec.U.A;
    append_rows(G, w, S, gu, spec.U.b, Matrix::Zero(spec.U.num_rows(), n));
  }
  append_rows(G, w, S, spec.T.A * Su[N], spec.T.b, -spec.T.A * Sx[N]);

  // Rows without input dependence restrict x alone.
  qp.state_set = Polytope::whole_space(n);
  std::vector<int> keep;
  for (int i = 0; i < G.rows(); ++i) {
    if (G.row(i).cwiseAbs().maxCoeff() <= 1e-14) {
      qp.state_set.add_row(-S.row(i).transpose(), w(i));
    } else {
      keep.push_back(i);
    }
  }
  qp.G = G(keep, Eigen::all);
  qp.w = w(keep);
  qp.S = S(keep, Eigen::all);
  if (qp.num_rows() == 0) {
    throw ModelError("condense: no input constraints");
  }
  return qp;
}

Vector mpc_sequence(const ParametricQp& qp, const Eigen::Ref<const Vector>& x) {
  if (x.size() != qp.state_dim()) {
    throw std::invalid_argument("mpc_point: state dimension mismatch");
  }
  if (!contains(qp.state_set, x, Tolerances::kFeasibility)) {
    throw InfeasibleStateError("mpc_point: state constraints violated");
  }
  QuadraticProgram prob;
  prob.hessian = qp.H;
  prob.linear = qp.F.transpose() * x;
  prob.A = qp.G;
  prob.b = qp.w + qp.S * x;
  prob.C = Matrix::Zero(0, qp.num_inputs());
  prob.d = Vector::Zero(0);
  SolveResult r = solve_qp(prob);
  if (r.status == SolveStatus::Infeasible) {
    throw InfeasibleStateError("mpc_point: state outside the feasible set");
  }
  if (!r.optimal()) throw NumericalError("mpc_point: QP solver failed");
  return r.point;
}

Vector mpc_point(const ParametricQp& qp, const Eigen::Ref<const Vector>& x) {
  return mpc_sequence(qp, x).head(qp.input_dim);
}

OcpSpec example1_spec() {
  OcpSpec s;
  s.A = Matrix::Constant(1, 1, 6.0 / 5.0);
  s.B = Matrix::Constant(1, 1, 1.0);
  s.Q = Matrix::Constant(1, 1, 19.0 / 5.0);
  s.R = Matrix::Constant(1, 1, 1.0);
  s.P = Matrix::Constant(1, 1, 5.0);
  s.N = 2;
  s.X = Polytope::box(Vector::Constant(1, -10), Vector::Constant(1, 10));
  s.U = Polytope::box(Vector::Constant(1, -1), Vector::Constant(1, 1));
  s.T = Polytope::box(Vector::Constant(1, -1), Vector::Constant(1, 1));
  return s;
}

OcpSpec example2_spec() {
  OcpSpec s;
  s.A.resize(2, 2);
  s.A << 1, 1, 0, 1;
  s.B.resize(2, 1);
  s.B << 0.5, 1;
  s.Q = Matrix::Identity(2, 2);
  s.R = Matrix::Constant(1, 1, 1.0);
  s.N = 3;
  Vector xmax(2);
  xmax << 25, 5;
  s.X = Polytope::box(-xmax, xmax);
  s.U = Polytope::box(Vector::Constant(1, -1), Vector::Constant(1, 1));
  s.P = dare(s.A, s.B, s.Q, s.R);
  const Matrix K = lqr_gain(s.A, s.B, s.R, s.P);
  Polytope admissible = s.X.intersect(Polytope(s.U.A * K, s.U.b));
  s.T = max_output_admissible_set(s.A + s.B * K, admissible);
  return s;
}

}  // namespace maxcert
