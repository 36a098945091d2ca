#include "maxcert/mpc.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "test_util.hpp"

namespace maxcert {
namespace {

using testing_util::uniform;
using testing_util::uniform_matrix;
using testing_util::uniform_vector;

Vector scalar(double v) { return Vector::Constant(1, v); }

OcpSpec random_spec(std::mt19937_64& rng, int N) {
  OcpSpec s;
  s.A = uniform_matrix(rng, 2, 2, -1.5, 1.5);
  s.B = uniform_matrix(rng, 2, 1, -1.0, 1.0);
  s.Q = Matrix::Identity(2, 2);
  s.R = Matrix::Constant(1, 1, uniform(rng, 0.1, 2.0));
  s.P = 2.0 * Matrix::Identity(2, 2);
  s.N = N;
  s.X = Polytope::box(-5.0 * Vector::Ones(2), 5.0 * Vector::Ones(2));
  s.U = Polytope::box(-Vector::Ones(1), Vector::Ones(1));
  s.T = s.X;
  return s;
}

// Samples uniformly in the bounding box of p, keeping points inside.
std::vector<Vector> sample_inside(std::mt19937_64& rng, const Polytope& p,
                                  int count) {
  auto [lo, hi] = bounding_box(p);
  std::vector<Vector> out;
  while (static_cast<int>(out.size()) < count) {
    Vector x(lo.size());
    for (int j = 0; j < x.size(); ++j) x(j) = uniform(rng, lo(j), hi(j));
    if (contains(p, x, 0.0)) out.push_back(x);
  }
  return out;
}

TEST(Condense, ExampleOneSaturates) {
  ParametricQp qp = condense(example1_spec());
  EXPECT_EQ(qp.num_inputs(), 2);
  EXPECT_NEAR(mpc_point(qp, scalar(2.0))(0), -1.0, 1e-9);
}

TEST(MpcPoint, ExampleOne) {
  ParametricQp qp = condense(example1_spec());
  EXPECT_NEAR(mpc_point(qp, scalar(0.5))(0), -0.5, 1e-9);
  EXPECT_NEAR(mpc_point(qp, scalar(-2.0))(0), 1.0, 1e-9);
  EXPECT_THROW(mpc_point(qp, scalar(3.0)), InfeasibleStateError);
  EXPECT_THROW(mpc_point(qp, scalar(11.0)), InfeasibleStateError);
}

TEST(Condense, HorizonOneGivesUnconstrainedGain) {
  std::mt19937_64 rng(21);
  OcpSpec s = random_spec(rng, 1);
  const Matrix L = uniform_matrix(rng, 2, 2, -1, 1);
  s.P = L * L.transpose() + Matrix::Identity(2, 2);
  s.X = Polytope::box(-1e3 * Vector::Ones(2), 1e3 * Vector::Ones(2));
  s.U = Polytope::box(-1e3 * Vector::Ones(1), 1e3 * Vector::Ones(1));
  s.T = s.X;
  ParametricQp qp = condense(s);
  const Matrix K = lqr_gain(s.A, s.B, s.R, s.P);
  for (int t = 0; t < 10; ++t) {
    Vector x = uniform_vector(rng, 2, -0.1, 0.1);
    EXPECT_NEAR((mpc_point(qp, x) - K * x).norm(), 0.0, 1e-9);
  }
}

// Sparse formulation: z = (x̂(1..N), û(0..N−1)) with explicit dynamics.
Vector sparse_inputs(const OcpSpec& s, const Vector& x0) {
  const int n = s.state_dim(), m = s.input_dim(), N = s.N;
  const int nz = N * n + N * m;
  auto xcol = [&](int k) { return (k - 1) * n; };  // k = 1..N
  auto ucol = [&](int k) { return N * n + k * m; };
  QuadraticProgram qp;
  qp.hessian = Matrix::Zero(nz, nz);
  for (int k = 1; k <= N; ++k) {
    qp.hessian.block(xcol(k), xcol(k), n, n) = 2.0 * (k == N ? s.P : s.Q);
  }
  for (int k = 0; k < N; ++k) {
    qp.hessian.block(ucol(k), ucol(k), m, m) = 2.0 * s.R;
  }
  qp.linear = Vector::Zero(nz);
  qp.A = Matrix::Zero(0, nz);
  qp.b = Vector::Zero(0);
  qp.C = Matrix::Zero(N * n, nz);
  qp.d = Vector::Zero(N * n);
  for (int k = 0; k < N; ++k) {
    qp.C.block(k * n, xcol(k + 1), n, n) = Matrix::Identity(n, n);
    qp.C.block(k * n, ucol(k), n, m) = -s.B;
    if (k == 0) {
      qp.d.segment(0, n) = s.A * x0;
    } else {
      qp.C.block(k * n, xcol(k), n, n) = -s.A;
    }
  }
  auto add = [&](const Matrix& rows, int col, const Vector& rhs) {
    Matrix block = Matrix::Zero(rows.rows(), nz);
    block.middleCols(col, rows.cols()) = rows;
    qp.A.conservativeResize(qp.A.rows() + rows.rows(), nz);
    qp.A.bottomRows(rows.rows()) = block;
    qp.b.conservativeResize(qp.b.size() + rhs.size());
    qp.b.tail(rhs.size()) = rhs;
  };
  for (int k = 0; k < N; ++k) {
    if (k > 0) add(s.X.A, xcol(k), s.X.b);
    add(s.U.A, ucol(k), s.U.b);
  }
  add(s.T.A, xcol(N), s.T.b);
  SolveResult r = solve_qp(qp);
  EXPECT_TRUE(r.optimal());
  return r.point.tail(N * m);
}

TEST(Condense, MatchesSparseFormulation) {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    OcpSpec s = random_spec(rng, 3);
    ParametricQp qp = condense(s);
    for (int t = 0; t < 5; ++t) {
      Vector x = uniform_vector(rng, 2, -3, 3);
      Vector U;
      try {
        U = mpc_sequence(qp, x);
      } catch (const InfeasibleStateError&) {
        continue;
      }
      EXPECT_LT((U - sparse_inputs(s, x)).cwiseAbs().maxCoeff(), 1e-8);
      ++checked;
    }
  }
  EXPECT_GT(checked, 30);
}

TEST(ExplicitMpc, ExampleOneThreePieces) {
  PwaFunction f = explicit_mpc(condense(example1_spec()));
  ASSERT_EQ(f.num_regions(), 3);
  const double k[3] = {0.0, -1.0, 0.0};
  const double b[3] = {1.0, 0.0, -1.0};
  const double lo[3] = {-20.0 / 9.0, -1.0, 1.0};
  const double hi[3] = {-1.0, 1.0, 20.0 / 9.0};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(f.gains[i](0, 0), k[i], 1e-9);
    EXPECT_NEAR(f.offsets[i](0), b[i], 1e-9);
    auto [rlo, rhi] = bounding_box(f.regions[i]);
    EXPECT_NEAR(rlo(0), lo[i], 1e-9);
    EXPECT_NEAR(rhi(0), hi[i], 1e-9);
  }
  auto [dlo, dhi] = bounding_box(feasible_set(f));
  EXPECT_NEAR(dlo(0), -20.0 / 9.0, 1e-9);
  EXPECT_NEAR(dhi(0), 20.0 / 9.0, 1e-9);
}

void expect_oracle_equivalence(const ParametricQp& qp, const PwaFunction& f,
                               int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (const Vector& x : sample_inside(rng, f.domain, samples)) {
    const Vector u = f.eval(x);
    worst = std::max(worst, (u - mpc_point(qp, x)).cwiseAbs().maxCoeff());
    EXPECT_LE(u.cwiseAbs().maxCoeff(), 1.0 + 1e-8);  // saturation, U = [−1, 1]
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(ExplicitMpc, ExampleTwoMatchesPointOracle) {
  ParametricQp qp = condense(example2_spec());
  ExplicitMpcReport rep;
  PwaFunction f = explicit_mpc(qp, &rep);
  // One critical region per optimal active set; identical first-input laws
  // with convex unions are then merged.
  EXPECT_EQ(rep.regions_before_merge, 29);
  EXPECT_EQ(f.num_regions(), 25);
  EXPECT_LE(max_discontinuity(f), 1e-7);
  expect_oracle_equivalence(qp, f, 10000, 17);
}

TEST(ExplicitMpc, RandomInstancesMatchPointOracle) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 4; ++trial) {
    ParametricQp qp = condense(random_spec(rng, 2 + trial % 2));
    PwaFunction f = explicit_mpc(qp);
    f.validate();
    EXPECT_LE(max_discontinuity(f), 1e-7);
    for (const Polytope& r : f.regions) {
      EXPECT_TRUE(is_full_dimensional(r));
      EXPECT_TRUE(contains_set(f.domain, r, 1e-7));
    }
    expect_oracle_equivalence(qp, f, 1000, 100 + trial);
  }
}

TEST(FeasibleSet, OutsidePointsAreInfeasible) {
  std::mt19937_64 rng(12);
  ParametricQp qp = condense(example2_spec());
  PwaFunction f = explicit_mpc(qp);
  const Polytope& dom = feasible_set(f);
  int outside = 0;
  for (int t = 0; t < 1000; ++t) {
    Vector x(2);
    x << uniform(rng, -25, 25), uniform(rng, -5, 5);
    const double margin = (dom.A * x - dom.b).maxCoeff();
    if (std::abs(margin) < 1e-6) continue;
    if (margin > 0) {
      ++outside;
      EXPECT_THROW(mpc_point(qp, x), InfeasibleStateError);
    } else {
      EXPECT_NO_THROW(mpc_point(qp, x));
    }
  }
  EXPECT_GT(outside, 100);
}

TEST(Dare, ZeroDynamicsGivesQ) {
  Matrix Q(2, 2);
  Q << 2, 0.5, 0.5, 1;
  Matrix P = dare(Matrix::Zero(2, 2), Matrix::Ones(2, 1), Q, Matrix::Identity(1, 1));
  EXPECT_LT((P - Q).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Dare, ScalarExampleIsFive) {
  const Matrix A = Matrix::Constant(1, 1, 1.2), B = Matrix::Ones(1, 1);
  const Matrix Q = Matrix::Constant(1, 1, 3.8), R = Matrix::Ones(1, 1);
  EXPECT_NEAR(dare(A, B, Q, R)(0, 0), 5.0, 1e-10);
  EXPECT_NEAR(dare_residual(A, B, Q, R, Matrix::Constant(1, 1, 5.0)), 0.0,
              1e-13);
}

TEST(Dare, DoubleIntegratorResidual) {
  const OcpSpec s = example2_spec();
  EXPECT_LE(dare_residual(s.A, s.B, s.Q, s.R, s.P), 1e-10);
  EXPECT_LT((s.P - s.P.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(s.P).eigenvalues().minCoeff(), 0.0);
}

TEST(Dare, UnstabilizableThrows) {
  const Matrix A = Matrix::Constant(1, 1, 2.0);
  EXPECT_THROW(dare(A, Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1)),
               ModelError);
}

TEST(Moas, ZeroClosedLoopKeepsConstraints) {
  Polytope c = Polytope::box(-Vector::Ones(2), 2.0 * Vector::Ones(2));
  Polytope O = max_output_admissible_set(Matrix::Zero(2, 2), c);
  EXPECT_TRUE(contains_set(O, c));
  EXPECT_TRUE(contains_set(c, O));
}

TEST(Moas, ScalarContraction) {
  Polytope O = max_output_admissible_set(Matrix::Constant(1, 1, 0.5),
                                         Polytope::box(scalar(-1), scalar(1)));
  auto [lo, hi] = bounding_box(O);
  EXPECT_NEAR(lo(0), -1.0, 1e-12);
  EXPECT_NEAR(hi(0), 1.0, 1e-12);
}

TEST(Moas, DoubleIntegratorIsInvariant) {
  const OcpSpec s = example2_spec();
  const Matrix Acl = s.A + s.B * lqr_gain(s.A, s.B, s.R, s.P);
  const Matrix K = lqr_gain(s.A, s.B, s.R, s.P);
  std::mt19937_64 rng(4);
  for (const Vector& x : sample_inside(rng, s.T, 1000)) {
    EXPECT_TRUE(contains(s.T, Acl * x, 1e-9));
    EXPECT_LE(std::abs((K * x)(0)), 1.0 + 1e-9);
  }
}

TEST(Moas, UnstableThrows) {
  EXPECT_THROW(max_output_admissible_set(Matrix::Constant(1, 1, 1.5),
                                         Polytope::box(scalar(-1), scalar(1))),
               ModelError);
}

TEST(OcpSpec, ValidationErrors) {
  OcpSpec s = example1_spec();
  s.N = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = example1_spec();
  s.T = Polytope::box(scalar(-20), scalar(20));
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = example1_spec();
  s.R = Matrix::Zero(1, 1);
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace maxcert
