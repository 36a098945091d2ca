#include "maxcert/maxout.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace maxcert {
namespace {

using testing_util::random_network;
using testing_util::uniform;
using testing_util::uniform_matrix;
using testing_util::uniform_vector;

// Φ(x) = max{−x, −1} − max{−x−1, 0}.
MaxoutNetwork saturation_network() {
  MaxoutNetwork net = MaxoutNetwork::zeros(1, {2}, {2}, 1);
  net.layers[0].W << -1, 0, -1, 0;
  net.layers[0].b << 0, -1, -1, 0;
  net.W_out << 1, -1;
  return net;
}

Vector scalar(double v) { return Vector::Constant(1, v); }

// Literal nested-max evaluation, written independently of the library.
Vector naive_eval(const MaxoutNetwork& net, const Vector& x) {
  std::vector<double> y(x.data(), x.data() + x.size());
  for (const MaxoutLayer& layer : net.layers) {
    std::vector<double> next;
    for (int s = 0; s < layer.w; ++s) {
      double best = -kInf;
      for (int j = 0; j < layer.p; ++j) {
        const int row = s * layer.p + j;
        double z = layer.b(row);
        for (size_t c = 0; c < y.size(); ++c) z += layer.W(row, c) * y[c];
        best = std::max(best, z);
      }
      next.push_back(best);
    }
    y = next;
  }
  Vector out = net.b_out;
  for (int r = 0; r < out.size(); ++r) {
    for (size_t c = 0; c < y.size(); ++c) out(r) += net.W_out(r, c) * y[c];
  }
  return out;
}

TEST(Eval, SaturationNetwork) {
  const MaxoutNetwork net = saturation_network();
  EXPECT_DOUBLE_EQ(eval(net, scalar(0.5))(0), -0.5);
  EXPECT_DOUBLE_EQ(eval(net, scalar(2.0))(0), -1.0);
  EXPECT_DOUBLE_EQ(eval(net, scalar(-2.0))(0), 1.0);
}

TEST(Eval, SingleChannelIsAffine) {
  std::mt19937_64 rng(1);
  MaxoutNetwork net = random_network(rng, 3, {1}, {1}, 1);
  const Vector x = uniform_vector(rng, 3, -1, 1);
  const double expected =
      net.W_out(0, 0) * (net.layers[0].W.row(0).dot(x) + net.layers[0].b(0)) +
      net.b_out(0);
  EXPECT_NEAR(eval(net, x)(0), expected, 1e-15);
}

TEST(Eval, MatchesNestedMax) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    MaxoutNetwork net = random_network(rng, 1 + t % 3, 1 + t % 2, 3, 4, 4);
    const Vector x = uniform_vector(rng, net.input_dim, -2, 2);
    EXPECT_LT((eval(net, x) - naive_eval(net, x)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Eval, DimensionMismatchThrows) {
  EXPECT_THROW(eval(saturation_network(), Vector::Zero(2)), std::invalid_argument);
}

TEST(LocalGain, SaturationNetwork) {
  const MaxoutNetwork net = saturation_network();
  EXPECT_DOUBLE_EQ(local_gain(net, scalar(0.5))(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(local_gain(net, scalar(2.0))(0, 0), 0.0);
  EXPECT_THROW(local_gain(net, scalar(1.0)), BoundaryPointError);
}

TEST(LocalGain, MatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    MaxoutNetwork net = random_network(rng, 1 + t % 3, 1 + t % 2, 2, 4, 4);
    const Vector x = uniform_vector(rng, net.input_dim, -1, 1);
    const ActivationPattern pat = activation_pattern(net, x);
    if (pat.min_margin < 1e-4) continue;  // stay clear of kinks
    const Matrix K = local_gain(net, x);
    const double h = 1e-6;
    for (int j = 0; j < net.input_dim; ++j) {
      Vector e = Vector::Unit(net.input_dim, j) * h;
      const Vector fd = (eval(net, x + e) - eval(net, x - e)) / (2 * h);
      EXPECT_LT((fd - K.col(j)).cwiseAbs().maxCoeff(), 1e-5);
    }
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(LocalGain, PiecewiseConstant) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    MaxoutNetwork net = random_network(rng, 2, 1, 2, 4, 4);
    const Vector x = uniform_vector(rng, 2, -1, 1);
    if (activation_pattern(net, x).min_margin < 1e-6) continue;
    const Vector d = uniform_vector(rng, 2, -1, 1);
    const Vector y = x + 1e-9 * d;
    if (activation_pattern(net, y).has_tie) continue;
    EXPECT_EQ(local_gain(net, x), local_gain(net, y));
  }
}

TEST(ActivationPattern, SaturationNetwork) {
  const ActivationPattern pat = activation_pattern(saturation_network(), scalar(0.5));
  ASSERT_EQ(pat.winners.size(), 1u);
  EXPECT_EQ(pat.winners[0][0], 0);  // −x
  EXPECT_EQ(pat.winners[0][1], 1);  // 0
  EXPECT_FALSE(pat.has_tie);
}

TEST(ActivationPattern, SingleChannelWinners) {
  std::mt19937_64 rng(5);
  MaxoutNetwork net = random_network(rng, 2, {3, 2}, {1, 1}, 1);
  const ActivationPattern pat = activation_pattern(net, uniform_vector(rng, 2, -1, 1));
  for (const auto& layer : pat.winners) {
    for (int k : layer) EXPECT_EQ(k, 0);
  }
  EXPECT_EQ(pat.min_margin, kInf);
}

TEST(ActivationPattern, ReproducesEvalAndGainProduct) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    MaxoutNetwork net = random_network(rng, 2, 2, 3, 4, 4);
    const Vector x = uniform_vector(rng, 2, -1, 1);
    const ActivationPattern pat = activation_pattern(net, x);
    auto [K, c] = pattern_affine(net, pat);
    EXPECT_LT((K * x + c - eval(net, x)).cwiseAbs().maxCoeff(), 1e-12);
    // Winners dominate their neuron's channels.
    Vector y = x;
    for (int i = 0; i < net.num_layers(); ++i) {
      const MaxoutLayer& layer = net.layers[i];
      const Vector z = layer.W * y + layer.b;
      Vector next(layer.w);
      for (int s = 0; s < layer.w; ++s) {
        const double win = z(s * layer.p + pat.winners[i][s]);
        EXPECT_GE(win, z.segment(s * layer.p, layer.p).maxCoeff());
        next(s) = win;
      }
      y = next;
    }
    if (!pat.has_tie) {
      EXPECT_LT((local_gain(net, x) - K).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Eval, MidpointConsistency) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 1000; ++t) {
    MaxoutNetwork net = random_network(rng, 2, 1, 2, 3, 3);
    const Vector x = uniform_vector(rng, 2, -1, 1);
    if (activation_pattern(net, x).min_margin < 1e-3) continue;
    const Vector h = 1e-5 * uniform_vector(rng, 2, -1, 1);
    const double mid = 0.5 * (eval(net, x - h)(0) + eval(net, x + h)(0));
    EXPECT_NEAR(eval(net, x)(0), mid, 1e-12);
  }
}

TEST(ParamCount, TableTopologies) {
  const int t1[7][2] = {{1, 4}, {2, 4}, {2, 3}, {2, 2}, {3, 2}, {4, 2}, {4, 1}};
  const long p1[7] = {10, 19, 15, 11, 16, 21, 13};
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(param_count(1, {t1[i][0]}, {t1[i][1]}, 1), p1[i]);
  }
  const int t2[7][2] = {{2, 38}, {2, 10}, {2, 3}, {3, 3}, {5, 3}, {10, 3}, {23, 3}};
  const long p2[7] = {231, 63, 21, 31, 51, 101, 231};
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(param_count(2, {t2[i][0]}, {t2[i][1]}, 1), p2[i]);
  }
  EXPECT_EQ(param_count(MaxoutNetwork::zeros(2, {2}, {38}, 1)), 231);
}

TEST(ReluToMaxout, SingleNeuron) {
  MaxoutNetwork net = relu_to_maxout({Matrix::Ones(1, 1)}, {Vector::Zero(1)},
                                     Matrix::Ones(1, 1), Vector::Zero(1));
  EXPECT_DOUBLE_EQ(eval(net, scalar(-1.0))(0), 0.0);
  EXPECT_DOUBLE_EQ(eval(net, scalar(2.0))(0), 2.0);
  EXPECT_EQ(net.layers[0].p, 2);
  EXPECT_EQ(net.layers[0].W.rows(), 2);
}

TEST(ReluToMaxout, MatchesDirectForwardPass) {
  std::mt19937_64 rng(8);
  const std::vector<Matrix> W = {uniform_matrix(rng, 4, 3, -1, 1),
                                 uniform_matrix(rng, 3, 4, -1, 1)};
  const std::vector<Vector> b = {uniform_vector(rng, 4, -1, 1),
                                 uniform_vector(rng, 3, -1, 1)};
  const Matrix Wo = uniform_matrix(rng, 2, 3, -1, 1);
  const Vector bo = uniform_vector(rng, 2, -1, 1);
  MaxoutNetwork net = relu_to_maxout(W, b, Wo, bo);
  for (const MaxoutLayer& layer : net.layers) {
    EXPECT_EQ(layer.W.rows(), 2 * layer.w);
    for (int s = 0; s < layer.w; ++s) {
      EXPECT_TRUE(layer.W.row(2 * s + 1).isZero(0.0));
      EXPECT_EQ(layer.b(2 * s + 1), 0.0);
    }
  }
  for (int t = 0; t < 1000; ++t) {
    Vector y = uniform_vector(rng, 3, -2, 2);
    const Vector x = y;
    for (size_t i = 0; i < W.size(); ++i) y = (W[i] * y + b[i]).cwiseMax(0.0);
    EXPECT_LT((eval(net, x) - (Wo * y + bo)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(MaxoutNetwork, ValidateRejectsBadShapes) {
  MaxoutNetwork net = saturation_network();
  net.layers[0].p = 3;
  EXPECT_THROW(net.validate(), std::invalid_argument);
  net = saturation_network();
  net.W_out.resize(1, 3);
  EXPECT_THROW(net.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace maxcert
