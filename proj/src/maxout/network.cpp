#include <cmath>

#include "maxcert/maxout.hpp"

namespace maxcert {

MaxoutNetwork MaxoutNetwork::zeros(int input_dim,
                                   const std::vector<int>& widths,
                                   const std::vector<int>& channels,
                                   int output_dim) {
  if (widths.size() != channels.size()) {
    throw std::invalid_argument("MaxoutNetwork::zeros: widths/channels length");
  }
  MaxoutNetwork net;
  net.input_dim = input_dim;
  int prev = input_dim;
  for (size_t i = 0; i < widths.size(); ++i) {
    MaxoutLayer layer;
    layer.w = widths[i];
    layer.p = channels[i];
    layer.W = Matrix::Zero(layer.p * layer.w, prev);
    layer.b = Vector::Zero(layer.p * layer.w);
    net.layers.push_back(std::move(layer));
    prev = widths[i];
  }
  net.W_out = Matrix::Zero(output_dim, prev);
  net.b_out = Vector::Zero(output_dim);
  net.validate();
  return net;
}

void MaxoutNetwork::validate() const {
  if (input_dim < 1) throw std::invalid_argument("MaxoutNetwork: input_dim < 1");
  int prev = input_dim;
  for (const MaxoutLayer& layer : layers) {
    if (layer.p < 1 || layer.w < 1) {
      throw std::invalid_argument("MaxoutNetwork: p and w must be ≥ 1");
    }
    if (layer.W.rows() != layer.p * layer.w || layer.W.cols() != prev ||
        layer.b.size() != layer.W.rows()) {
      throw std::invalid_argument("MaxoutNetwork: layer shape mismatch");
    }
    if (!layer.W.allFinite() || !layer.b.allFinite()) {
      throw std::invalid_argument("MaxoutNetwork: non-finite parameters");
    }
    prev = layer.w;
  }
  if (W_out.rows() < 1 || W_out.cols() != prev || b_out.size() != W_out.rows()) {
    throw std::invalid_argument("MaxoutNetwork: output layer shape mismatch");
  }
  if (!W_out.allFinite() || !b_out.allFinite()) {
    throw std::invalid_argument("MaxoutNetwork: non-finite parameters");
  }
}

namespace {

void check_input(const MaxoutNetwork& net, const Eigen::Ref<const Vector>& x) {
  if (x.size() != net.input_dim) {
    throw std::invalid_argument("maxout: input dimension mismatch");
  }
}

}  // namespace

ActivationPattern activation_pattern(const MaxoutNetwork& net,
                                     const Eigen::Ref<const Vector>& x,
                                     double tie_tol) {
  check_input(net, x);
  ActivationPattern pat;
  Vector y = x;
  for (const MaxoutLayer& layer : net.layers) {
    const Vector z = layer.W * y + layer.b;
    std::vector<int> win(layer.w);
    Vector next(layer.w);
    for (int s = 0; s < layer.w; ++s) {
      int best = 0;
      for (int j = 1; j < layer.p; ++j) {
        if (z(s * layer.p + j) > z(s * layer.p + best)) best = j;
      }
      for (int j = 0; j < layer.p; ++j) {
        if (j == best) continue;
        const double gap = z(s * layer.p + best) - z(s * layer.p + j);
        pat.min_margin = std::min(pat.min_margin, gap);
      }
      win[s] = best;
      next(s) = z(s * layer.p + best);
    }
    pat.winners.push_back(std::move(win));
    y = std::move(next);
  }
  pat.has_tie = pat.min_margin <= tie_tol;
  return pat;
}

Vector eval(const MaxoutNetwork& net, const Eigen::Ref<const Vector>& x) {
  check_input(net, x);
  Vector y = x;
  for (const MaxoutLayer& layer : net.layers) {
    const Vector z = layer.W * y + layer.b;
    Vector next(layer.w);
    for (int s = 0; s < layer.w; ++s) {
      next(s) = z.segment(s * layer.p, layer.p).maxCoeff();
    }
    y = std::move(next);
  }
  return net.W_out * y + net.b_out;
}

std::pair<Matrix, Vector> pattern_affine(const MaxoutNetwork& net,
                                         const ActivationPattern& pattern) {
  if (static_cast<int>(pattern.winners.size()) != net.num_layers()) {
    throw std::invalid_argument("pattern_affine: layer count mismatch");
  }
  Matrix K = Matrix::Identity(net.input_dim, net.input_dim);
  Vector c = Vector::Zero(net.input_dim);
  for (int i = 0; i < net.num_layers(); ++i) {
    const MaxoutLayer& layer = net.layers[i];
    std::vector<int> rows(layer.w);
    for (int s = 0; s < layer.w; ++s) {
      rows[s] = s * layer.p + pattern.winners[i][s];
    }
    const Matrix Wsel = layer.W(rows, Eigen::all);
    c = (Wsel * c + layer.b(rows)).eval();
    K = (Wsel * K).eval();
  }
  return {net.W_out * K, net.W_out * c + net.b_out};
}

Matrix local_gain(const MaxoutNetwork& net, const Eigen::Ref<const Vector>& x,
                  double tie_tol) {
  const ActivationPattern pat = activation_pattern(net, x, tie_tol);
  if (pat.has_tie) {
    throw BoundaryPointError("local_gain: x lies on an activation boundary");
  }
  return pattern_affine(net, pat).first;
}

long param_count(int input_dim, const std::vector<int>& widths,
                 const std::vector<int>& channels, int output_dim) {
  long total = 0;
  long prev = input_dim;
  for (size_t i = 0; i < widths.size(); ++i) {
    total += (prev + 1) * channels[i] * widths[i];
    prev = widths[i];
  }
  return total + (prev + 1) * output_dim;
}

long param_count(const MaxoutNetwork& net) {
  std::vector<int> widths, channels;
  for (const MaxoutLayer& layer : net.layers) {
    widths.push_back(layer.w);
    channels.push_back(layer.p);
  }
  return param_count(net.input_dim, widths, channels, net.output_dim());
}

MaxoutNetwork relu_to_maxout(const std::vector<Matrix>& weights,
                             const std::vector<Vector>& biases,
                             const Matrix& W_out, const Vector& b_out) {
  if (weights.empty() || weights.size() != biases.size()) {
    throw std::invalid_argument("relu_to_maxout: weights/biases mismatch");
  }
  MaxoutNetwork net;
  net.input_dim = static_cast<int>(weights.front().cols());
  for (size_t i = 0; i < weights.size(); ++i) {
    const Matrix& W = weights[i];
    if (biases[i].size() != W.rows()) {
      throw std::invalid_argument("relu_to_maxout: bias length mismatch");
    }
    MaxoutLayer layer;
    layer.p = 2;
    layer.w = static_cast<int>(W.rows());
    layer.W = Matrix::Zero(2 * W.rows(), W.cols());
    layer.b = Vector::Zero(2 * W.rows());
    for (int s = 0; s < layer.w; ++s) {
      layer.W.row(2 * s) = W.row(s);
      layer.b(2 * s) = biases[i](s);
    }
    net.layers.push_back(std::move(layer));
  }
  net.W_out = W_out;
  net.b_out = b_out;
  net.validate();
  return net;
}

}  // namespace maxcert
