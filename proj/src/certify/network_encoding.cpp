#include <algorithm>
#include <cmath>

#include "maxcert/certify.hpp"

namespace maxcert {

namespace {

// Per-layer facts used to tighten the constants of one hidden layer.
struct LayerBounds {
  Vector M;         // upper bound on q_s − z_r per channel row
  Vector q_lo, q_hi;
  std::vector<int> fixed;  // -1 free, 0 or 1 fixed δ
};

LayerBounds loose_bounds(const MaxoutLayer& layer, double big_m) {
  LayerBounds lb;
  lb.M = Vector::Constant(layer.W.rows(), big_m);
  lb.q_lo = Vector::Constant(layer.w, -kInf);
  lb.q_hi = Vector::Constant(layer.w, kInf);
  lb.fixed.assign(layer.W.rows(), -1);
  return lb;
}

// diff(j, r) bounds max (z_j − z_r) over the domain for channels of one neuron.
void finish_bounds(LayerBounds& lb, const MaxoutLayer& layer, const Matrix& diff,
                   const Vector& z_lo, const Vector& z_hi, double big_m) {
  for (int s = 0; s < layer.w; ++s) {
    const int r0 = s * layer.p;
    lb.q_lo(s) = z_lo.segment(r0, layer.p).maxCoeff();
    lb.q_hi(s) = z_hi.segment(r0, layer.p).maxCoeff();
    int always = -1;
    for (int r = 0; r < layer.p; ++r) {
      double m = 0.0;
      bool dominated = false;
      bool dominant = true;
      for (int j = 0; j < layer.p; ++j) {
        if (j == r) continue;
        m = std::max(m, diff(r0 + j, r0 + r));
        if (diff(r0 + r, r0 + j) < -1e-9) dominated = true;
        if (diff(r0 + j, r0 + r) > 0.0) dominant = false;
      }
      lb.M(r0 + r) = std::min(m, big_m);
      if (dominated) lb.fixed[r0 + r] = 0;
      if (dominant && always < 0) always = r;
    }
    if (always >= 0) {
      for (int r = 0; r < layer.p; ++r) lb.fixed[r0 + r] = r == always ? 1 : 0;
    }
  }
}

// First layer: exact ranges by LP over the domain.
LayerBounds lp_bounds(const MaxoutLayer& layer, const Polytope& domain,
                      double big_m) {
  LayerBounds lb = loose_bounds(layer, big_m);
  const int rows = static_cast<int>(layer.W.rows());
  Vector z_lo(rows), z_hi(rows);
  for (int r = 0; r < rows; ++r) {
    const Vector a = layer.W.row(r).transpose();
    z_hi(r) = *support(domain, a) + layer.b(r);
    z_lo(r) = -*support(domain, -a) + layer.b(r);
  }
  Matrix diff = Matrix::Zero(rows, rows);
  for (int s = 0; s < layer.w; ++s) {
    for (int j = s * layer.p; j < (s + 1) * layer.p; ++j) {
      for (int r = s * layer.p; r < (s + 1) * layer.p; ++r) {
        if (j == r) continue;
        const Vector a = (layer.W.row(j) - layer.W.row(r)).transpose();
        diff(j, r) = *support(domain, a) + layer.b(j) - layer.b(r);
      }
    }
  }
  finish_bounds(lb, layer, diff, z_lo, z_hi, big_m);
  return lb;
}

// Deeper layers: interval arithmetic on the previous layer's ranges.
LayerBounds interval_bounds(const MaxoutLayer& layer, const Vector& lo,
                            const Vector& hi, double big_m) {
  LayerBounds lb = loose_bounds(layer, big_m);
  if (!lo.allFinite() || !hi.allFinite()) return lb;
  const Matrix Wp = layer.W.cwiseMax(0.0);
  const Matrix Wn = layer.W.cwiseMin(0.0);
  const Vector z_lo = Wp * lo + Wn * hi + layer.b;
  const Vector z_hi = Wp * hi + Wn * lo + layer.b;
  const int rows = static_cast<int>(layer.W.rows());
  Matrix diff = Matrix::Zero(rows, rows);
  for (int j = 0; j < rows; ++j) {
    for (int r = 0; r < rows; ++r) diff(j, r) = z_hi(j) - z_lo(r);
  }
  finish_bounds(lb, layer, diff, z_lo, z_hi, big_m);
  return lb;
}

LinExpr preactivation(const MaxoutLayer& layer, int row,
                      const std::vector<int>& prev) {
  LinExpr z = LinExpr::constant_expr(layer.b(row));
  for (int c = 0; c < layer.W.cols(); ++c) {
    if (layer.W(row, c) != 0.0) z.add_term(prev[c], layer.W(row, c));
  }
  return z;
}

}  // namespace

NetworkEncoding encode_network_output(MiEncoding& enc,
                                      const std::vector<int>& x_cols,
                                      const MaxoutNetwork& net,
                                      const BigMOptions& options) {
  net.validate();
  if (static_cast<int>(x_cols.size()) != net.input_dim) {
    throw std::invalid_argument("encode_network_output: input dimension");
  }
  if (options.eps < 0.0 || !(options.big_m > 0.0)) {
    throw std::invalid_argument("encode_network_output: need ε ≥ 0, b̄ > 0");
  }
  NetworkEncoding out;
  out.x_cols = x_cols;
  std::vector<int> prev = x_cols;
  Vector lo = Vector::Constant(net.input_dim, -kInf);
  Vector hi = Vector::Constant(net.input_dim, kInf);
  const std::string tag = "net" + std::to_string(enc.num_cols());

  for (int i = 0; i < net.num_layers(); ++i) {
    const MaxoutLayer& layer = net.layers[i];
    LayerBounds lb;
    if (!options.tighten_over) {
      lb = loose_bounds(layer, options.big_m);
    } else if (i == 0) {
      lb = lp_bounds(layer, *options.tighten_over, options.big_m);
    } else {
      lb = interval_bounds(layer, lo, hi, options.big_m);
    }
    const std::string layer_tag = tag + ".l" + std::to_string(i);
    const int q0 = enc.add_block(layer_tag + ".q", layer.w, -kInf, kInf);
    const int d0 = enc.add_block(layer_tag + ".delta",
                                 static_cast<int>(layer.W.rows()), 0.0, 1.0,
                                 true);
    std::vector<int> qcols(layer.w), dcols(layer.W.rows());
    for (int s = 0; s < layer.w; ++s) {
      qcols[s] = q0 + s;
      if (std::isfinite(lb.q_lo(s))) enc.set_bounds(q0 + s, lb.q_lo(s), lb.q_hi(s));
      std::vector<int> group;
      for (int j = 0; j < layer.p; ++j) {
        const int r = s * layer.p + j;
        const int d = d0 + r;
        dcols[r] = d;
        group.push_back(d);
        if (lb.fixed[r] >= 0) enc.set_bounds(d, lb.fixed[r], lb.fixed[r]);
        const LinExpr z = preactivation(layer, r, prev);
        // q_s − z_r + M δ_r ≤ M
        LinExpr upper = LinExpr::var(q0 + s);
        upper.add(z, -1.0).add_term(d, lb.M(r));
        enc.add_le(upper, lb.M(r));
        // z_r − q_s − ε δ_r ≤ −ε
        LinExpr lower = z;
        lower.add_term(q0 + s, -1.0).add_term(d, -options.eps);
        enc.add_le(lower, -options.eps);
      }
      enc.add_one_hot(group);
    }
    out.q.push_back(qcols);
    out.delta.push_back(dcols);
    prev = qcols;
    lo = lb.q_lo;
    hi = lb.q_hi;
  }

  const Matrix Wp = net.W_out.cwiseMax(0.0);
  const Matrix Wn = net.W_out.cwiseMin(0.0);
  out.output_lo = Vector::Constant(net.output_dim(), -kInf);
  out.output_hi = Vector::Constant(net.output_dim(), kInf);
  if (lo.allFinite() && hi.allFinite()) {
    out.output_lo = Wp * lo + Wn * hi + net.b_out;
    out.output_hi = Wp * hi + Wn * lo + net.b_out;
  }
  for (int k = 0; k < net.output_dim(); ++k) {
    LinExpr y = LinExpr::constant_expr(net.b_out(k));
    for (int c = 0; c < net.W_out.cols(); ++c) {
      if (net.W_out(k, c) != 0.0) y.add_term(prev[c], net.W_out(k, c));
    }
    out.output.push_back(std::move(y));
  }
  return out;
}

std::vector<std::vector<LinExpr>> encode_network_gain(
    MiEncoding& enc, const MaxoutNetwork& net, const NetworkEncoding& out,
    double w_bound) {
  if (static_cast<int>(out.delta.size()) != net.num_layers()) {
    throw std::invalid_argument("encode_network_gain: encoding/network mismatch");
  }
  if (!(w_bound > 0.0)) {
    throw std::invalid_argument("encode_network_gain: need w̄ > 0");
  }
  const int n = net.input_dim;
  // xi[s][r]: gain of neuron s w.r.t. input r; starts as the identity.
  std::vector<std::vector<LinExpr>> xi(n, std::vector<LinExpr>(n));
  for (int s = 0; s < n; ++s) xi[s][s] = LinExpr::constant_expr(1.0);
  bool constant = true;

  for (int i = 0; i < net.num_layers(); ++i) {
    const MaxoutLayer& layer = net.layers[i];
    const int rows = static_cast<int>(layer.W.rows());
    // W̃ = W ξ^(i−1).
    std::vector<std::vector<LinExpr>> Wt(rows, std::vector<LinExpr>(n));
    for (int h = 0; h < rows; ++h) {
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < layer.W.cols(); ++c) {
          if (layer.W(h, c) != 0.0) Wt[h][r].add(xi[c][r], layer.W(h, c));
        }
      }
    }
    std::vector<std::vector<LinExpr>> next(layer.w, std::vector<LinExpr>(n));
    if (constant) {
      // ξ̃_{h,r} = δ_h · W̃_{h,r} with W̃ constant: linear in δ.
      for (int h = 0; h < rows; ++h) {
        for (int r = 0; r < n; ++r) {
          const double coef = Wt[h][r].constant;
          if (coef != 0.0) next[h / layer.p][r].add_term(out.delta[i][h], coef);
        }
      }
    } else {
      const std::string tag =
          "gain" + std::to_string(enc.num_cols()) + ".l" + std::to_string(i);
      const int x0 = enc.add_block(tag, rows * n, -w_bound, w_bound);
      for (int h = 0; h < rows; ++h) {
        const int d = out.delta[i][h];
        for (int r = 0; r < n; ++r) {
          const int col = x0 + h * n + r;
          // |ξ̃| ≤ w̄ δ
          enc.add_le(LinExpr::var(col).add_term(d, -w_bound), 0.0);
          enc.add_le(LinExpr::var(col, -1.0).add_term(d, -w_bound), 0.0);
          // |ξ̃ − W̃| ≤ w̄ (1 − δ)
          LinExpr a = LinExpr::var(col);
          a.add(Wt[h][r], -1.0).add_term(d, w_bound);
          enc.add_le(a, w_bound);
          LinExpr b = LinExpr::var(col, -1.0);
          b.add(Wt[h][r], 1.0).add_term(d, w_bound);
          enc.add_le(b, w_bound);
          next[h / layer.p][r].add_term(col, 1.0);
        }
      }
    }
    xi = std::move(next);
    constant = false;
  }

  const int m = net.output_dim();
  std::vector<std::vector<LinExpr>> K(m, std::vector<LinExpr>(n));
  for (int k = 0; k < m; ++k) {
    for (int r = 0; r < n; ++r) {
      for (int s = 0; s < static_cast<int>(xi.size()); ++s) {
        if (net.W_out(k, s) != 0.0) K[k][r].add(xi[s][r], net.W_out(k, s));
      }
    }
  }
  return K;
}

}  // namespace maxcert
