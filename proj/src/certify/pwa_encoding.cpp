#include <algorithm>
#include <cmath>

#include "maxcert/certify.hpp"

namespace maxcert {

PwaEncoding encode_pwa_law(MiEncoding& enc, const std::vector<int>& x_cols,
                           const PwaFunction& pwa, const Polytope& domain) {
  pwa.validate();
  const int n = pwa.state_dim();
  const int m = pwa.output_dim();
  const int R = pwa.num_regions();
  if (static_cast<int>(x_cols.size()) != n || domain.dim() != n) {
    throw std::invalid_argument("encode_pwa_law: dimension mismatch");
  }
  if (is_empty(domain)) throw EmptyPolytopeError("encode_pwa_law: empty domain");

  auto x_expr = [&](const Vector& a) {
    LinExpr e;
    for (int j = 0; j < n; ++j) {
      if (a(j) != 0.0) e.add_term(x_cols[j], a(j));
    }
    return e;
  };

  const std::string tag = "pwa" + std::to_string(enc.num_cols());
  const int rho0 = enc.add_block(tag + ".rho", R, 0.0, 1.0, true);
  PwaEncoding out;
  std::vector<char> reachable(R, 0);
  for (int i = 0; i < R; ++i) {
    out.rho.push_back(rho0 + i);
    reachable[i] = !is_empty(pwa.regions[i].intersect(domain));
    if (!reachable[i]) enc.set_bounds(rho0 + i, 0.0, 0.0);
  }
  if (std::none_of(reachable.begin(), reachable.end(), [](char c) { return c; })) {
    throw ModelError("encode_pwa_law: domain meets no region");
  }
  enc.add_one_hot(out.rho);

  // A_i x ≤ b_i + M (1 − ρ_i), M from the row's maximum over the domain.
  for (int i = 0; i < R; ++i) {
    if (!reachable[i]) continue;
    const Polytope& P = pwa.regions[i];
    for (int k = 0; k < P.num_rows(); ++k) {
      const Vector a = P.A.row(k).transpose();
      const double M = *support(domain, a) - P.b(k);
      if (M <= 1e-12 * (1.0 + std::abs(P.b(k)))) continue;  // implied by the domain
      enc.add_le(x_expr(a).add_term(rho0 + i, M), P.b(k) + M);
    }
  }

  // u_k equals the selected piece; big-M bounds from LPs over the domain.
  out.value_lo = Vector::Constant(m, kInf);
  out.value_hi = Vector::Constant(m, -kInf);
  Matrix L(R, m), U(R, m);
  for (int i = 0; i < R; ++i) {
    if (!reachable[i]) continue;
    const Polytope local = pwa.regions[i].intersect(domain);
    for (int k = 0; k < m; ++k) {
      const Vector g = pwa.gains[i].row(k).transpose();
      const double c = pwa.offsets[i](k);
      L(i, k) = -*support(domain, -g) + c;
      U(i, k) = *support(domain, g) + c;
      out.value_lo(k) = std::min(out.value_lo(k), -*support(local, -g) + c);
      out.value_hi(k) = std::max(out.value_hi(k), *support(local, g) + c);
    }
  }
  const int u0 = enc.add_block(tag + ".u", m, -kInf, kInf);
  for (int k = 0; k < m; ++k) {
    enc.set_bounds(u0 + k, out.value_lo(k), out.value_hi(k));
    for (int i = 0; i < R; ++i) {
      if (!reachable[i]) continue;
      LinExpr f = x_expr(pwa.gains[i].row(k).transpose());
      f.constant = pwa.offsets[i](k);
      // u − f ≤ (u_hi − L)(1 − ρ)
      const double Ma = std::max(0.0, out.value_hi(k) - L(i, k));
      LinExpr a = LinExpr::var(u0 + k);
      a.add(f, -1.0).add_term(rho0 + i, Ma);
      enc.add_le(a, Ma);
      // f − u ≤ (U − u_lo)(1 − ρ)
      const double Mb = std::max(0.0, U(i, k) - out.value_lo(k));
      LinExpr b = f;
      b.add_term(u0 + k, -1.0).add_term(rho0 + i, Mb);
      enc.add_le(b, Mb);
    }
    out.value.push_back(LinExpr::var(u0 + k));
  }

  out.gain.assign(m, std::vector<LinExpr>(n));
  for (int k = 0; k < m; ++k) {
    for (int r = 0; r < n; ++r) {
      for (int i = 0; i < R; ++i) {
        if (reachable[i] && pwa.gains[i](k, r) != 0.0) {
          out.gain[k][r].add_term(rho0 + i, pwa.gains[i](k, r));
        }
      }
    }
  }
  return out;
}

}  // namespace maxcert
