#pragma once

// Sampled training data from an explicit law and minibatch SGD on the mean
// squared error of a maxout network.

#include <cstdint>
#include <vector>

#include "maxcert/maxout.hpp"
#include "maxcert/mpc.hpp"

namespace maxcert {

struct Dataset {
  Matrix inputs;   // D × n
  Matrix targets;  // D × m
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(inputs.rows()); }
};

/// D points uniform on the law's domain (rejection from its bounding box)
/// with targets π(x). When `oracle` is given every target is re-checked
/// against the per-point QP to 1e-8.
Dataset sample_dataset(const PwaFunction& pwa, int count, std::uint64_t seed,
                       const ParametricQp* oracle = nullptr);

/// ê² = (1/D) Σ ‖π(x_i) − Φ(x_i)‖².
double mse(const MaxoutNetwork& net, const Dataset& data);

/// Gradient of the mean squared error over the given rows, laid out as a
/// network of the same shape. The winning channel of each neuron (lowest
/// index on ties) receives the gradient.
MaxoutNetwork mse_gradient(const MaxoutNetwork& net, const Dataset& data,
                           const std::vector<int>& rows);

/// Network of the given shape with parameters uniform in [−0.5, 0.5].
MaxoutNetwork random_init(int input_dim, const std::vector<int>& widths,
                          const std::vector<int>& channels, int output_dim,
                          std::uint64_t seed);

struct TrainOptions {
  int epochs = 1000;
  int batch = 64;
  double step = 1e-2;
  std::uint64_t seed = 0;
};

struct TrainReport {
  MaxoutNetwork network;
  /// MSE after each epoch (of the kept parameters, so non-increasing).
  std::vector<double> mse_trace;
  TrainOptions options;
  double initial_mse = 0.0;
  double final_mse = 0.0;
  int halvings = 0;
};

class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Minibatch SGD from `init`. After every epoch the full-data MSE is
/// compared with the best so far; on a regression the best parameters are
/// restored and the step is halved. An epoch ending non-finite or above
/// 10⁶ × the initial MSE counts as a regression; DivergenceError is thrown
/// once 40 such epochs occur in a row.
TrainReport train(const MaxoutNetwork& init, const Dataset& data,
                  const TrainOptions& options);

}  // namespace maxcert
