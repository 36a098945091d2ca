#include <algorithm>
#include <cmath>

#include "maxcert/exact.hpp"

namespace maxcert {

double DcDecomposition::eval(const Eigen::Ref<const Vector>& x) const {
  double p = -kInf;
  double q = -kInf;
  for (const AffineTerm& t : p_terms) p = std::max(p, t(x));
  for (const AffineTerm& t : q_terms) q = std::max(q, t(x));
  return p - q;
}

std::vector<AffineTerm> pieces(const PwaFunction& pwa, int dim) {
  if (dim < 0 || dim >= pwa.output_dim()) {
    throw std::invalid_argument("pieces: output index out of range");
  }
  std::vector<AffineTerm> out;
  for (int i = 0; i < pwa.num_regions(); ++i) {
    out.push_back({pwa.gains[i].row(dim).transpose(), pwa.offsets[i](dim)});
  }
  return out;
}

double lattice_eval(const std::vector<std::vector<int>>& lattice,
                    const std::vector<AffineTerm>& pieces,
                    const Eigen::Ref<const Vector>& x) {
  double best = -kInf;
  for (const std::vector<int>& set : lattice) {
    double lo = kInf;
    for (int j : set) lo = std::min(lo, pieces[j](x));
    best = std::max(best, lo);
  }
  return best;
}

std::vector<std::vector<int>> lattice_rep(const PwaFunction& pwa, int dim,
                                          int samples, std::uint64_t seed) {
  pwa.validate();
  const std::vector<AffineTerm> ell = pieces(pwa, dim);
  const int R = pwa.num_regions();
  std::vector<std::vector<int>> lattice(R);
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < R; ++j) {
      if (j == i) {
        lattice[i].push_back(j);
        continue;
      }
      // min over R_i of ℓ_j − ℓ_i
      const Vector dir = ell[i].beta - ell[j].beta;
      const std::optional<double> s = support(pwa.regions[i], dir);
      if (!s) throw EmptyPolytopeError("lattice_rep: empty region");
      const double lo = -*s + ell[j].gamma - ell[i].gamma;
      if (lo >= -1e-9) lattice[i].push_back(j);
    }
  }
  if (samples > 0) {
    for (const Vector& x : sample_uniform(pwa.domain, samples, seed)) {
      const double want = pwa.eval(x)(dim);
      if (std::abs(lattice_eval(lattice, ell, x) - want) > 1e-7 * (1.0 + std::abs(want))) {
        throw LatticeError("lattice_rep: max-min identity fails; the law is not continuous");
      }
    }
  }
  return lattice;
}

}  // namespace maxcert
