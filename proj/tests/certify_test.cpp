#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "maxcert/certify.hpp"
#include "test_util.hpp"

namespace maxcert {
namespace {

using testing_util::random_network;
using testing_util::uniform;
using testing_util::uniform_vector;

MaxoutNetwork saturation_network() {
  MaxoutNetwork net = MaxoutNetwork::zeros(1, {2}, {2}, 1);
  net.layers[0].W << -1, 0, -1, 0;
  net.layers[0].b << 0, -1, -1, 0;
  net.W_out << 1, -1;
  return net;
}

const PwaFunction& example1_law() {
  static const PwaFunction law = explicit_mpc(condense(example1_spec()));
  return law;
}

const PwaFunction& example2_law() {
  static const PwaFunction law = explicit_mpc(condense(example2_spec()));
  return law;
}

Polytope box(int n, double r) {
  return Polytope::box(Vector::Constant(n, -r), Vector::Constant(n, r));
}

// Encoding with the state columns pinned to x.
struct Pinned {
  MiEncoding enc;
  std::vector<int> x_cols;
};

Pinned pin(const Vector& x) {
  Pinned p;
  const int x0 = p.enc.add_block("x", static_cast<int>(x.size()), 0.0, 0.0);
  for (int j = 0; j < x.size(); ++j) {
    p.x_cols.push_back(x0 + j);
    p.enc.set_bounds(x0 + j, x(j), x(j));
  }
  return p;
}

SolveResult optimize(const MiEncoding& enc, const LinExpr& objective,
                     Sense sense) {
  return solve_milp(enc.to_milp(objective, sense));
}

// Smallest gap between the winner and the runner-up over all neurons.
double pattern_margin(const MaxoutNetwork& net, const Vector& x) {
  return activation_pattern(net, x).min_margin;
}

TEST(NetworkOutputEncoding, SaturationNetworkAtHalf) {
  const MaxoutNetwork net = saturation_network();
  Pinned p = pin(Vector::Constant(1, 0.5));
  BigMOptions opt;
  opt.big_m = 1e4;
  const NetworkEncoding e = encode_network_output(p.enc, p.x_cols, net, opt);
  const SolveResult r = optimize(p.enc, e.output[0], Sense::Maximize);
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_NEAR(r.value + e.output[0].constant, -0.5, 1e-9);
  EXPECT_NEAR(r.point(e.delta[0][0]), 1.0, 1e-9);
  EXPECT_NEAR(r.point(e.delta[0][3]), 1.0, 1e-9);
}

TEST(NetworkOutputEncoding, SingleChannelNeuronsAreEqualities) {
  std::mt19937_64 rng(3);
  const MaxoutNetwork net = random_network(rng, 2, {3}, {1}, 1);
  const Vector x = uniform_vector(rng, 2, -1, 1);
  Pinned p = pin(x);
  const NetworkEncoding e =
      encode_network_output(p.enc, p.x_cols, net, BigMOptions{});
  const double want = eval(net, x)(0);
  for (Sense s : {Sense::Maximize, Sense::Minimize}) {
    const SolveResult r = optimize(p.enc, e.output[0], s);
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_NEAR(r.value + e.output[0].constant, want, 1e-9);
  }
}

TEST(NetworkOutputEncoding, RandomNetworksMatchForwardPass) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const MaxoutNetwork net = random_network(rng, n, 1, 2, 4, 4);
    const Vector x = uniform_vector(rng, n, -1, 1);
    const Polytope domain = box(n, 1.0);
    for (bool tighten : {false, true}) {
      Pinned p = pin(x);
      BigMOptions opt;
      opt.big_m = 100.0;
      opt.tighten_over = tighten ? &domain : nullptr;
      const NetworkEncoding e = encode_network_output(p.enc, p.x_cols, net, opt);
      const double want = eval(net, x)(0);
      // Both extremes coincide: the output is determined by x.
      for (Sense s : {Sense::Maximize, Sense::Minimize}) {
        const SolveResult r = optimize(p.enc, e.output[0], s);
        ASSERT_EQ(r.status, SolveStatus::Optimal) << "trial " << trial;
        EXPECT_NEAR(r.value + e.output[0].constant, want, 1e-7)
            << "trial " << trial << " tighten " << tighten;
      }
    }
  }
}

TEST(NetworkOutputEncoding, RejectsBadOptions) {
  const MaxoutNetwork net = saturation_network();
  Pinned p = pin(Vector::Zero(1));
  BigMOptions opt;
  opt.eps = -1.0;
  EXPECT_THROW(encode_network_output(p.enc, p.x_cols, net, opt),
               std::invalid_argument);
  opt.eps = 0.0;
  opt.big_m = 0.0;
  EXPECT_THROW(encode_network_output(p.enc, p.x_cols, net, opt),
               std::invalid_argument);
  Pinned q = pin(Vector::Zero(2));
  EXPECT_THROW(encode_network_output(q.enc, q.x_cols, net, BigMOptions{}),
               std::invalid_argument);
}

// Gain of output k w.r.t. input r, minimized and maximized at pinned x.
struct GainRange {
  bool feasible = true;
  Matrix lo, hi;
};

GainRange pinned_gain(const MaxoutNetwork& net, const Vector& x, double eps,
                      const Polytope* tighten) {
  Pinned p = pin(x);
  BigMOptions opt;
  opt.big_m = 100.0;
  opt.eps = eps;
  opt.tighten_over = tighten;
  const NetworkEncoding e = encode_network_output(p.enc, p.x_cols, net, opt);
  const auto K = encode_network_gain(p.enc, net, e, 100.0);
  GainRange g;
  const int m = net.output_dim();
  const int n = net.input_dim;
  g.lo.resize(m, n);
  g.hi.resize(m, n);
  for (int k = 0; k < m; ++k) {
    for (int r = 0; r < n; ++r) {
      for (Sense s : {Sense::Maximize, Sense::Minimize}) {
        const SolveResult res = optimize(p.enc, K[k][r], s);
        if (res.status == SolveStatus::Infeasible) {
          g.feasible = false;
          return g;
        }
        const double v = res.value + K[k][r].constant;
        (s == Sense::Maximize ? g.hi : g.lo)(k, r) = v;
      }
    }
  }
  return g;
}

TEST(NetworkGainEncoding, SaturationNetworkSlopes) {
  const MaxoutNetwork net = saturation_network();
  GainRange mid = pinned_gain(net, Vector::Constant(1, 0.5), 1e-5, nullptr);
  ASSERT_TRUE(mid.feasible);
  EXPECT_NEAR(mid.lo(0, 0), -1.0, 1e-9);
  EXPECT_NEAR(mid.hi(0, 0), -1.0, 1e-9);
  GainRange sat = pinned_gain(net, Vector::Constant(1, 2.0), 1e-5, nullptr);
  ASSERT_TRUE(sat.feasible);
  EXPECT_NEAR(sat.lo(0, 0), 0.0, 1e-9);
  EXPECT_NEAR(sat.hi(0, 0), 0.0, 1e-9);
}

TEST(NetworkGainEncoding, InfeasibleWithinMarginOfTie) {
  const MaxoutNetwork net = saturation_network();
  // Neuron 1 ties at x = 1, neuron 2 at x = −1.
  for (double x : {1.0, 1.0 + 5e-6, -1.0, -1.0 - 5e-6}) {
    EXPECT_FALSE(pinned_gain(net, Vector::Constant(1, x), 1e-5, nullptr).feasible)
        << x;
  }
  EXPECT_TRUE(pinned_gain(net, Vector::Constant(1, 1.0 + 1e-4), 1e-5, nullptr)
                  .feasible);
}

TEST(NetworkGainEncoding, RandomNetworksMatchPatternGain) {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % 2);
    const MaxoutNetwork net = random_network(rng, n, m, 2, 4, 4);
    const Vector x = uniform_vector(rng, n, -1, 1);
    if (pattern_margin(net, x) < 1e-3) continue;  // interior points only
    ++checked;
    const Polytope domain = box(n, 1.0);
    const Matrix want = local_gain(net, x);
    for (const Polytope* t : {static_cast<const Polytope*>(nullptr), &domain}) {
      GainRange g = pinned_gain(net, x, 1e-5, t);
      ASSERT_TRUE(g.feasible) << "trial " << trial;
      EXPECT_LE((g.lo - want).cwiseAbs().maxCoeff(), 1e-7) << "trial " << trial;
      EXPECT_LE((g.hi - want).cwiseAbs().maxCoeff(), 1e-7) << "trial " << trial;
    }
    // Central differences agree with the recovered gain.
    const double h = 1e-7;
    for (int r = 0; r < n; ++r) {
      Vector e = Vector::Zero(n);
      e(r) = h;
      const Vector fd = (eval(net, x + e) - eval(net, x - e)) / (2 * h);
      EXPECT_LE((fd - want.col(r)).cwiseAbs().maxCoeff(), 1e-5);
    }
  }
  EXPECT_EQ(checked, 50);
}

TEST(NetworkGainEncoding, ActivationIsUniqueAtInteriorPoints) {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 100 && checked < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 2);
    const MaxoutNetwork net = random_network(rng, n, 1, 2, 3, 3);
    const Vector x = uniform_vector(rng, n, -1, 1);
    if (pattern_margin(net, x) < 1e-3) continue;
    ++checked;
    Pinned p = pin(x);
    BigMOptions opt;
    opt.big_m = 100.0;
    opt.eps = 1e-5;
    const NetworkEncoding e = encode_network_output(p.enc, p.x_cols, net, opt);
    const SolveResult base = optimize(p.enc, LinExpr{}, Sense::Maximize);
    ASSERT_EQ(base.status, SolveStatus::Optimal);
    const ActivationPattern pat = activation_pattern(net, x);
    for (size_t i = 0; i < e.delta.size(); ++i) {
      const MaxoutLayer& layer = net.layers[i];
      for (int s = 0; s < layer.w; ++s) {
        const int win = e.delta[i][s * layer.p + pat.winners[i][s]];
        EXPECT_NEAR(base.point(win), 1.0, 1e-9);
        // Forbidding the winner leaves nothing feasible.
        MiEncoding neg = p.enc;
        neg.set_bounds(win, 0.0, 0.0);
        EXPECT_EQ(optimize(neg, LinExpr{}, Sense::Maximize).status,
                  SolveStatus::Infeasible);
      }
    }
  }
  EXPECT_EQ(checked, 20);
}

TEST(NetworkGainEncoding, RequiresPositiveGainBound) {
  const MaxoutNetwork net = saturation_network();
  Pinned p = pin(Vector::Zero(1));
  BigMOptions opt;
  opt.eps = 1e-5;
  const NetworkEncoding e = encode_network_output(p.enc, p.x_cols, net, opt);
  EXPECT_THROW(encode_network_gain(p.enc, net, e, 0.0), std::invalid_argument);
}

TEST(PwaEncoding, Example1AtHalf) {
  const PwaFunction& law = example1_law();
  Pinned p = pin(Vector::Constant(1, 0.5));
  const PwaEncoding e = encode_pwa_law(p.enc, p.x_cols, law, law.domain);
  const SolveResult r = optimize(p.enc, e.value[0], Sense::Maximize);
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_NEAR(r.value, -0.5, 1e-9);
  EXPECT_NEAR(e.gain[0][0].value(r.point), -1.0, 1e-9);
  EXPECT_EQ(law.locate(Vector::Constant(1, 0.5)), 1);
  EXPECT_NEAR(r.point(e.rho[1]), 1.0, 1e-9);
}

TEST(PwaEncoding, SingleRegionIsAffine) {
  PwaFunction f;
  f.domain = box(2, 1.0);
  f.regions = {f.domain};
  f.gains = {(Matrix(1, 2) << 0.3, -2.0).finished()};
  f.offsets = {Vector::Constant(1, 0.7)};
  const Vector x = (Vector(2) << 0.25, -0.5).finished();
  Pinned p = pin(x);
  const PwaEncoding e = encode_pwa_law(p.enc, p.x_cols, f, f.domain);
  const SolveResult r = optimize(p.enc, e.value[0], Sense::Minimize);
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_EQ(r.point(e.rho[0]), 1.0);
  EXPECT_NEAR(r.value, 0.3 * 0.25 + 2.0 * 0.5 + 0.7, 1e-12);
}

TEST(PwaEncoding, Example2MatchesRegionLookup) {
  const PwaFunction& law = example2_law();
  const std::vector<Vector> xs = sample_uniform(law.domain, 1000, 5);
  Pinned base = pin(Vector::Zero(law.state_dim()));
  const PwaEncoding e = encode_pwa_law(base.enc, base.x_cols, law, law.domain);
  for (size_t t = 0; t < xs.size(); ++t) {
    const Vector& x = xs[t];
    MiEncoding enc = base.enc;
    for (int j = 0; j < x.size(); ++j) enc.set_bounds(base.x_cols[j], x(j), x(j));
    const SolveResult r = optimize(enc, e.value[0], Sense::Maximize);
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_NEAR(r.value, law.eval(x)(0), 1e-7) << t;
    // The selected region contains x, so its gain is the piece gain there.
    int sel = -1;
    for (size_t i = 0; i < e.rho.size(); ++i) {
      if (r.point(e.rho[i]) > 0.5) sel = static_cast<int>(i);
    }
    ASSERT_GE(sel, 0);
    EXPECT_TRUE(contains(law.regions[sel], x, 1e-7)) << t;
    for (int c = 0; c < law.state_dim(); ++c) {
      EXPECT_NEAR(e.gain[0][c].value(r.point), law.gains[sel](0, c), 1e-7);
    }
    if (law.locate(x, -1e-6) >= 0) {
      // Strictly inside one region: the gain is the lookup gain.
      EXPECT_LE((law.gain(x) - law.gains[sel]).cwiseAbs().maxCoeff(), 1e-7);
    }
  }
}

TEST(PwaEncoding, RejectsDomainMissingEveryRegion) {
  const PwaFunction& law = example1_law();
  Pinned p = pin(Vector::Constant(1, 5.0));
  const Polytope far = Polytope::box(Vector::Constant(1, 4.0), Vector::Constant(1, 6.0));
  EXPECT_THROW(encode_pwa_law(p.enc, p.x_cols, law, far), ModelError);
}

TEST(Norms, VectorAndMatrix) {
  const Vector v = (Vector(3) << 1.0, -4.0, 2.5).finished();
  EXPECT_DOUBLE_EQ(vector_norm(v, NormKind::One), 7.5);
  EXPECT_DOUBLE_EQ(vector_norm(v, NormKind::Inf), 4.0);
  const Matrix M = (Matrix(2, 3) << 1, -2, 3, -4, 5, -0.5).finished();
  EXPECT_DOUBLE_EQ(matrix_norm(M, NormKind::Inf), 9.5);  // row sums 6, 9.5
  EXPECT_DOUBLE_EQ(matrix_norm(M, NormKind::One), 7.0);  // column sums 5, 7, 3.5
  EXPECT_EQ(parse_norm("1"), NormKind::One);
  EXPECT_EQ(parse_norm("inf"), NormKind::Inf);
  EXPECT_EQ(parse_norm("infinity"), NormKind::Inf);
  EXPECT_THROW(parse_norm("2"), std::invalid_argument);
  EXPECT_EQ(to_string(NormKind::One), "1");
}

// Constant law against the zero network: the certificates are plain norms.
MaxoutNetwork zero_network(int n, int m) {
  return MaxoutNetwork::zeros(n, {1}, {1}, m);
}

TEST(Norms, EpigraphEncodingsReproduceNorms) {
  std::mt19937_64 rng(29);
  CertifySettings s;
  s.preflight_samples = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % 3);
    PwaFunction f;
    f.domain = box(n, 1.0);
    f.regions = {f.domain};
    f.gains = {testing_util::uniform_matrix(rng, m, n, -3, 3)};
    f.offsets = {uniform_vector(rng, m, -3, 3)};
    const MaxoutNetwork net = zero_network(n, m);
    for (NormKind a : {NormKind::One, NormKind::Inf}) {
      const Certificate l = lipschitz(f, net, f.domain, a, s);
      EXPECT_NEAR(l.value, matrix_norm(f.gains[0], a), 1e-9);
      // Gain zero: the error is ‖offset‖ at x = 0, larger at the corners.
      f.gains[0].setZero();
      const Certificate c = max_error(f, net, f.domain, a, s);
      EXPECT_NEAR(c.value, vector_norm(f.offsets[0], a), 1e-9);
      f.gains[0] = testing_util::uniform_matrix(rng, m, n, -3, 3);
    }
  }
}

TEST(Certify, Example1ExactNetwork) {
  const PwaFunction& law = example1_law();
  const MaxoutNetwork net = saturation_network();
  const Polytope T = box(1, 1.0);
  for (bool tighten : {true, false}) {
    CertifySettings s;
    s.tighten = tighten;
    const Certificate e = max_error(law, net, law.domain, NormKind::Inf, s);
    EXPECT_EQ(e.status, SolveStatus::Optimal);
    EXPECT_LE(e.value, 1e-9) << tighten;
    const Certificate l = lipschitz(law, net, T, NormKind::Inf, s);
    EXPECT_EQ(l.status, SolveStatus::Optimal);
    EXPECT_LE(l.value, 1e-9) << tighten;
    EXPECT_TRUE(contains(T, l.witness, 1e-6));
    EXPECT_TRUE(contains(law.domain, e.witness, 1e-6));
  }
}

TEST(Certify, Example1PerturbedNetwork) {
  const PwaFunction& law = example1_law();
  MaxoutNetwork net = saturation_network();
  net.layers[0].b(1) = -0.8;  // lower saturation moves to −0.8
  for (bool tighten : {true, false}) {
    CertifySettings s;
    s.tighten = tighten;
    const Certificate e = max_error(law, net, law.domain, NormKind::Inf, s);
    EXPECT_NEAR(e.value, 0.2, 1e-9);
    EXPECT_NEAR(replay(e, law, net), e.value, e.gap + 1e-6);
    const Certificate l = lipschitz(law, net, law.domain, NormKind::One, s);
    EXPECT_NEAR(l.value, 1.0, 1e-9);
    EXPECT_NEAR(replay(l, law, net), l.value, l.gap + 1e-6);
  }
}

TEST(Certify, DeterministicAcrossRuns) {
  const PwaFunction& law = example1_law();
  MaxoutNetwork net = saturation_network();
  net.layers[0].W(0, 0) = -0.9;
  const Certificate a = max_error(law, net, law.domain, NormKind::Inf, {});
  const Certificate b = max_error(law, net, law.domain, NormKind::Inf, {});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_EQ(a.witness, b.witness);
}

// Random two-piece law on a box, split by a random hyperplane.
PwaFunction random_law(std::mt19937_64& rng, int n, int m) {
  PwaFunction f;
  f.domain = box(n, 1.0);
  Vector a = uniform_vector(rng, n, -1, 1);
  a /= a.norm();
  const double c = uniform(rng, -0.3, 0.3);
  for (double sign : {1.0, -1.0}) {
    Polytope half;
    half.A = sign * a.transpose();
    half.b = Vector::Constant(1, sign * c);
    f.regions.push_back(f.domain.intersect(half));
    f.gains.push_back(testing_util::uniform_matrix(rng, m, n, -1, 1));
    f.offsets.push_back(uniform_vector(rng, m, -1, 1));
  }
  return f;
}

std::vector<Vector> grid_points(int n, int count, std::mt19937_64& rng) {
  std::vector<Vector> pts;
  if (n == 1) {
    for (int i = 0; i < count; ++i) {
      pts.push_back(Vector::Constant(1, -1.0 + 2.0 * i / (count - 1)));
    }
  } else {
    for (int i = 0; i < count; ++i) pts.push_back(uniform_vector(rng, n, -1, 1));
  }
  return pts;
}

TEST(Certify, RandomPairsBoundTheGridAndReplay) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2;
    const int m = 1 + static_cast<int>(rng() % 2);
    const PwaFunction law = random_law(rng, n, m);
    const MaxoutNetwork net = random_network(rng, n, m, 2, 3, 3);
    CertifySettings s;
    s.tighten = trial % 3 != 0;
    s.big_m = 100.0;
    s.w_bound = 100.0;
    for (NormKind a : {NormKind::One, NormKind::Inf}) {
      const Certificate e = max_error(law, net, law.domain, a, s);
      const Certificate l = lipschitz(law, net, law.domain, a, s);
      ASSERT_EQ(e.status, SolveStatus::Optimal);
      ASSERT_EQ(l.status, SolveStatus::Optimal);
      double grid_err = 0.0;
      double grid_lip = 0.0;
      for (const Vector& x : grid_points(n, 500, rng)) {
        const int i = law.locate(x);
        ASSERT_GE(i, 0);
        grid_err = std::max(grid_err, vector_norm(law.eval(x) - eval(net, x), a));
        if (pattern_margin(net, x) > 1e-4 && law.locate(x, -1e-4) >= 0) {
          grid_lip = std::max(grid_lip,
                              matrix_norm(law.gain(x) - local_gain(net, x), a));
        }
      }
      EXPECT_GE(e.value, grid_err - 1e-6) << "trial " << trial;
      EXPECT_GE(l.value, grid_lip - 1e-6) << "trial " << trial;
      EXPECT_TRUE(contains(law.domain, e.witness, 1e-6));
      EXPECT_TRUE(contains(law.domain, l.witness, 1e-6));
      EXPECT_NEAR(replay(e, law, net), e.value, e.gap + 1e-6) << "trial " << trial;
      EXPECT_NEAR(replay(l, law, net), l.value, l.gap + 1e-6) << "trial " << trial;
    }
  }
}

TEST(Certify, NodeLimitLeavesAGap) {
  std::mt19937_64 rng(37);
  const PwaFunction law = random_law(rng, 2, 1);
  const MaxoutNetwork net = random_network(rng, 2, {4, 4}, {4, 4}, 1);
  CertifySettings s;
  s.node_limit = 2;
  s.big_m = 100.0;
  const Certificate c = max_error(law, net, law.domain, NormKind::Inf, s);
  EXPECT_EQ(c.status, SolveStatus::GapLimit);
  EXPECT_GT(c.gap, 0.0);
}

TEST(Certify, PreflightRejectsBadSettings) {
  const PwaFunction& law = example1_law();
  const MaxoutNetwork net = saturation_network();
  CertifySettings s;
  s.big_m = 0.5;  // channel spreads reach ~2.2 on the domain
  EXPECT_THROW(max_error(law, net, law.domain, NormKind::Inf, s), InvalidBigMError);

  CertifySettings eps0;
  eps0.eps = 0.0;
  EXPECT_THROW(lipschitz(law, net, law.domain, NormKind::Inf, eps0),
               std::invalid_argument);

  std::mt19937_64 rng(41);
  MaxoutNetwork deep = random_network(rng, 1, {2, 2}, {2, 2}, 1);
  deep.layers[1].W *= 50.0;
  CertifySettings small_w;
  small_w.w_bound = 1.0;
  EXPECT_THROW(lipschitz(law, deep, law.domain, NormKind::Inf, small_w),
               InvalidBigMError);

  // Domain beyond the feasible set: coverage fails.
  const Polytope wide = box(1, 3.0);
  EXPECT_THROW(max_error(law, net, wide, NormKind::Inf, {}), ModelError);

  const MaxoutNetwork two_inputs = MaxoutNetwork::zeros(2, {1}, {1}, 1);
  EXPECT_THROW(max_error(law, two_inputs, law.domain, NormKind::Inf, {}),
               std::invalid_argument);
}

TEST(Certify, AllBoundaryDomainIsReported) {
  const PwaFunction& law = example1_law();
  const MaxoutNetwork net = saturation_network();
  // A sliver around the tie at x = 1, thinner than ε.
  const Polytope sliver =
      Polytope::box(Vector::Constant(1, 1.0 - 1e-6), Vector::Constant(1, 1.0 + 1e-6));
  CertifySettings s;
  s.preflight_samples = 0;
  EXPECT_THROW(lipschitz(law, net, sliver, NormKind::Inf, s), ModelError);
}

TEST(Certify, ReplayNeedsWitness) {
  Certificate c;
  EXPECT_THROW(replay(c, example1_law(), saturation_network()),
               std::invalid_argument);
}

}  // namespace
}  // namespace maxcert
