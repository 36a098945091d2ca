#include "maxcert/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace maxcert {
namespace {

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// y ← y + scale · g over every parameter block.
void axpy(MaxoutNetwork& y, double scale, const MaxoutNetwork& g) {
  for (size_t i = 0; i < y.layers.size(); ++i) {
    y.layers[i].W += scale * g.layers[i].W;
    y.layers[i].b += scale * g.layers[i].b;
  }
  y.W_out += scale * g.W_out;
  y.b_out += scale * g.b_out;
}

MaxoutNetwork zero_like(const MaxoutNetwork& net) {
  MaxoutNetwork g = net;
  for (MaxoutLayer& layer : g.layers) {
    layer.W.setZero();
    layer.b.setZero();
  }
  g.W_out.setZero();
  g.b_out.setZero();
  return g;
}

constexpr int kMaxStrikes = 40;

}  // namespace

Dataset sample_dataset(const PwaFunction& pwa, int count, std::uint64_t seed,
                       const ParametricQp* oracle) {
  if (count < 1) throw std::invalid_argument("sample_dataset: need D ≥ 1");
  pwa.validate();
  const std::vector<Vector> xs = sample_uniform(pwa.domain, count, seed);
  Dataset data;
  data.seed = seed;
  data.inputs.resize(count, pwa.state_dim());
  data.targets.resize(count, pwa.output_dim());
  for (int i = 0; i < count; ++i) {
    const Vector u = pwa.eval(xs[i]);
    if (oracle) {
      const Vector ref = mpc_point(*oracle, xs[i]);
      if ((ref - u).cwiseAbs().maxCoeff() > 1e-8) {
        throw NumericalError("sample_dataset: law disagrees with the QP at a sample");
      }
    }
    data.inputs.row(i) = xs[i].transpose();
    data.targets.row(i) = u.transpose();
  }
  return data;
}

double mse(const MaxoutNetwork& net, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("mse: empty dataset");
  if (data.inputs.cols() != net.input_dim ||
      data.targets.cols() != net.output_dim()) {
    throw std::invalid_argument("mse: dimension mismatch");
  }
  double sum = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const Vector x = data.inputs.row(i).transpose();
    sum += (eval(net, x) - data.targets.row(i).transpose()).squaredNorm();
  }
  return sum / data.size();
}

MaxoutNetwork mse_gradient(const MaxoutNetwork& net, const Dataset& data,
                           const std::vector<int>& rows) {
  if (rows.empty()) throw std::invalid_argument("mse_gradient: no rows");
  MaxoutNetwork g = zero_like(net);
  const int L = net.num_layers();
  std::vector<Vector> inputs(L + 1);
  std::vector<std::vector<int>> winners(L);
  const double scale = 2.0 / static_cast<double>(rows.size());
  for (int row : rows) {
    inputs[0] = data.inputs.row(row).transpose();
    for (int i = 0; i < L; ++i) {
      const MaxoutLayer& layer = net.layers[i];
      const Vector z = layer.W * inputs[i] + layer.b;
      inputs[i + 1].resize(layer.w);
      winners[i].resize(layer.w);
      for (int s = 0; s < layer.w; ++s) {
        Eigen::Index arg;
        inputs[i + 1](s) = z.segment(s * layer.p, layer.p).maxCoeff(&arg);
        winners[i][s] = s * layer.p + static_cast<int>(arg);
      }
    }
    const Vector y = net.W_out * inputs[L] + net.b_out;
    Vector grad = scale * (y - data.targets.row(row).transpose());
    g.W_out.noalias() += grad * inputs[L].transpose();
    g.b_out += grad;
    Vector back = net.W_out.transpose() * grad;
    for (int i = L - 1; i >= 0; --i) {
      const MaxoutLayer& layer = net.layers[i];
      Vector next = Vector::Zero(layer.W.cols());
      for (int s = 0; s < layer.w; ++s) {
        const int r = winners[i][s];
        g.layers[i].W.row(r) += back(s) * inputs[i].transpose();
        g.layers[i].b(r) += back(s);
        next += back(s) * layer.W.row(r).transpose();
      }
      back = std::move(next);
    }
  }
  return g;
}

MaxoutNetwork random_init(int input_dim, const std::vector<int>& widths,
                          const std::vector<int>& channels, int output_dim,
                          std::uint64_t seed) {
  MaxoutNetwork net = MaxoutNetwork::zeros(input_dim, widths, channels, output_dim);
  std::mt19937_64 rng(seed);
  auto fill = [&](auto& block) {
    for (Eigen::Index k = 0; k < block.size(); ++k) block.data()[k] = unit(rng) - 0.5;
  };
  for (MaxoutLayer& layer : net.layers) {
    fill(layer.W);
    fill(layer.b);
  }
  fill(net.W_out);
  fill(net.b_out);
  return net;
}

TrainReport train(const MaxoutNetwork& init, const Dataset& data,
                  const TrainOptions& options) {
  init.validate();
  if (options.epochs < 0 || options.batch < 1 || !(options.step > 0.0)) {
    throw std::invalid_argument("train: need epochs ≥ 0, batch ≥ 1, step > 0");
  }
  TrainReport rep;
  rep.options = options;
  rep.network = init;
  rep.initial_mse = mse(init, data);
  double best = rep.initial_mse;
  MaxoutNetwork current = init;
  double step = options.step;
  int strikes = 0;
  std::mt19937_64 rng(options.seed);
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < data.size(); start += options.batch) {
      const int stop = std::min(data.size(), start + options.batch);
      const std::vector<int> rows(order.begin() + start, order.begin() + stop);
      axpy(current, -step, mse_gradient(current, data, rows));
    }
    const double e = mse(current, data);
    if (e <= best) {
      best = e;
      rep.network = current;
      strikes = 0;
    } else {
      // Covers blow-ups too: restore and retry at half the step.
      const bool blown = !std::isfinite(e) || e > 1e6 * std::max(rep.initial_mse, 1e-12);
      if (blown && ++strikes > kMaxStrikes) {
        throw DivergenceError("train: MSE diverged at epoch " + std::to_string(epoch));
      }
      current = rep.network;
      step *= 0.5;
      ++rep.halvings;
    }
    rep.mse_trace.push_back(best);
  }
  rep.final_mse = best;
  return rep;
}

}  // namespace maxcert
