#include <algorithm>
#include <cmath>
#include <numeric>

#include "maxcert/exact.hpp"

namespace maxcert {

MaxoutNetwork network_from_dc(const std::vector<DcDecomposition>& parts,
                              int input_dim) {
  if (parts.empty()) throw std::invalid_argument("network_from_dc: no outputs");
  int p1 = 1;
  for (const DcDecomposition& dc : parts) {
    if (dc.p_terms.empty() || dc.q_terms.empty()) {
      throw std::invalid_argument("network_from_dc: empty term list");
    }
    p1 = std::max({p1, static_cast<int>(dc.p_terms.size()),
                   static_cast<int>(dc.q_terms.size())});
  }
  const int m = static_cast<int>(parts.size());
  MaxoutNetwork net = MaxoutNetwork::zeros(input_dim, {2 * m}, {p1}, m);
  MaxoutLayer& layer = net.layers[0];
  auto fill = [&](int neuron, const std::vector<AffineTerm>& terms) {
    for (int c = 0; c < p1; ++c) {
      const int row = neuron * p1 + c;
      if (c < static_cast<int>(terms.size())) {
        if (terms[c].beta.size() != input_dim) {
          throw std::invalid_argument("network_from_dc: dimension mismatch");
        }
        layer.W.row(row) = terms[c].beta.transpose();
        layer.b(row) = terms[c].gamma;
      } else {
        // An exact copy would tie everywhere; this one never wins.
        layer.W.row(row) = terms[0].beta.transpose();
        layer.b(row) = terms[0].gamma - 1.0;
      }
    }
  };
  for (int k = 0; k < m; ++k) {
    fill(2 * k, parts[k].p_terms);
    fill(2 * k + 1, parts[k].q_terms);
    net.W_out(k, 2 * k) = 1.0;
    net.W_out(k, 2 * k + 1) = -1.0;
  }
  return net;
}

MaxoutNetwork build_exact_type1(const PwaFunction& pwa,
                                const ExactOptions& options,
                                ExactReport* report) {
  pwa.validate();
  std::vector<DcDecomposition> parts;
  for (int k = 0; k < pwa.output_dim(); ++k) {
    const auto lattice = lattice_rep(pwa, k, options.dc.samples, options.dc.seed);
    parts.push_back(dc_decompose(lattice, pieces(pwa, k), pwa.domain, options.dc));
  }
  MaxoutNetwork net = network_from_dc(parts, pwa.state_dim());
  ExactReport rep;
  rep.p1 = net.layers[0].p;
  rep.num_params = param_count(net);
  for (const DcDecomposition& dc : parts) {
    rep.p_counts.push_back(static_cast<int>(dc.p_terms.size()));
    rep.q_counts.push_back(static_cast<int>(dc.q_terms.size()));
  }
  if (options.certify) {
    const Certificate c =
        max_error(pwa, net, pwa.domain, NormKind::Inf, options.settings);
    rep.max_error = c.value;
    if (!(c.status == SolveStatus::Optimal && c.value <= options.tolerance)) {
      throw CertificationError("build_exact_type1: certified error " +
                               std::to_string(c.value) + " exceeds tolerance");
    }
  }
  if (report) *report = rep;
  return net;
}

MaxoutNetwork build_exact_1d(const PwaFunction& pwa) {
  pwa.validate();
  if (pwa.state_dim() != 1 || pwa.output_dim() != 1) {
    throw std::invalid_argument("build_exact_1d: needs a scalar law of one state");
  }
  const int R = pwa.num_regions();
  std::vector<double> lo(R), hi(R);
  for (int i = 0; i < R; ++i) {
    auto [l, h] = bounding_box(pwa.regions[i]);
    lo[i] = l(0);
    hi[i] = h(0);
  }
  std::vector<int> order(R);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return lo[a] < lo[b]; });

  struct Line {
    double k, c;  // k x + c
  };
  std::vector<Line> seq;
  std::vector<double> breaks;
  for (int idx = 0; idx < R; ++idx) {
    const int i = order[idx];
    const Line line{pwa.gains[i](0, 0), pwa.offsets[i](0)};
    if (idx > 0) {
      const double t = hi[order[idx - 1]];
      if (std::abs(lo[i] - t) > 1e-9 * (1.0 + std::abs(t))) {
        throw ModelError("build_exact_1d: regions overlap or leave a gap");
      }
      const Line& prev = seq.back();
      const double jump = (line.k * t + line.c) - (prev.k * t + prev.c);
      if (std::abs(jump) > 1e-7 * (1.0 + std::abs(prev.k * t + prev.c))) {
        throw ModelError("build_exact_1d: law is discontinuous");
      }
      if (std::abs(line.k - prev.k) <= 1e-12) continue;  // same piece
      breaks.push_back(t);
    }
    seq.push_back(line);
  }

  // Walk right to left adding c·max(0, t − x) to the part with c's sign.
  std::vector<AffineTerm> g{{Vector::Constant(1, seq.back().k), seq.back().c}};
  std::vector<AffineTerm> h{{Vector::Zero(1), 0.0}};
  for (int b = static_cast<int>(breaks.size()) - 1; b >= 0; --b) {
    const double delta = seq[b + 1].k - seq[b].k;
    std::vector<AffineTerm>& part = delta > 0 ? g : h;
    const double c = std::abs(delta);
    const AffineTerm& cur = part.back();
    part.push_back({Vector::Constant(1, cur.beta(0) - c), cur.gamma + c * breaks[b]});
  }
  std::reverse(g.begin(), g.end());
  std::reverse(h.begin(), h.end());
  return network_from_dc({DcDecomposition{g, h}}, 1);
}

}  // namespace maxcert
