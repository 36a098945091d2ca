#pragma once

// Maxout networks: each hidden neuron outputs the max over p affine channels
// of the previous layer. Channel rows are stored neuron-major, so neuron s of
// a layer owns rows [s·p, (s+1)·p).

#include <vector>

#include "maxcert/optim.hpp"

namespace maxcert {

struct MaxoutLayer {
  Matrix W;  // (p·w) × w_prev
  Vector b;  // p·w
  int p = 1;
  int w = 1;
};

struct MaxoutNetwork {
  int input_dim = 1;
  std::vector<MaxoutLayer> layers;
  Matrix W_out;
  Vector b_out;

  int output_dim() const { return static_cast<int>(W_out.rows()); }
  int num_layers() const { return static_cast<int>(layers.size()); }

  /// Zero-weight network of the given shape.
  static MaxoutNetwork zeros(int input_dim, const std::vector<int>& widths,
                             const std::vector<int>& channels, int output_dim);

  /// Throws std::invalid_argument on inconsistent shapes or non-finite
  /// parameters.
  void validate() const;
};

/// Raised when a local gain is requested at an activation boundary.
class BoundaryPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kTieTol = 1e-9;

struct ActivationPattern {
  /// winners[i][s]: winning channel (0-based, within the neuron) of neuron s
  /// in layer i. Lowest index wins ties.
  std::vector<std::vector<int>> winners;
  /// Smallest gap between a winner and its best competitor over all neurons
  /// with p > 1 (+∞ if there are none).
  double min_margin = kInf;
  bool has_tie = false;
};

Vector eval(const MaxoutNetwork& net, const Eigen::Ref<const Vector>& x);

ActivationPattern activation_pattern(const MaxoutNetwork& net,
                                     const Eigen::Ref<const Vector>& x,
                                     double tie_tol = kTieTol);

/// Affine map selected by a fixed pattern: returns (K, c) with
/// Φ_pattern(x) = K x + c.
std::pair<Matrix, Vector> pattern_affine(const MaxoutNetwork& net,
                                         const ActivationPattern& pattern);

/// ∇Φ(x)ᵀ. Throws BoundaryPointError when a within-neuron tie is closer than
/// tie_tol.
Matrix local_gain(const MaxoutNetwork& net, const Eigen::Ref<const Vector>& x,
                  double tie_tol = kTieTol);

/// Σ (w_{i−1}+1) p_i w_i + (w_ℓ+1) w_{ℓ+1}.
long param_count(const MaxoutNetwork& net);
long param_count(int input_dim, const std::vector<int>& widths,
                 const std::vector<int>& channels, int output_dim);

/// Embeds a ReLU network (hidden weights/biases, then an affine output) as a
/// maxout network with p = 2 and a zero second channel.
MaxoutNetwork relu_to_maxout(const std::vector<Matrix>& weights,
                             const std::vector<Vector>& biases,
                             const Matrix& W_out, const Vector& b_out);

}  // namespace maxcert
