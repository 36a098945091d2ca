#include <algorithm>
#include <cmath>

#include "maxcert/exact.hpp"

namespace maxcert {
namespace {

constexpr double kSameTol = 1e-9;
constexpr double kDominatedTol = 1e-9;

bool same_term(const AffineTerm& a, const AffineTerm& b) {
  return std::abs(a.gamma - b.gamma) <= kSameTol &&
         (a.beta - b.beta).cwiseAbs().maxCoeff() <= kSameTol;
}

bool lex_less(const AffineTerm& a, const AffineTerm& b) {
  for (int j = 0; j < a.beta.size(); ++j) {
    if (a.beta(j) != b.beta(j)) return a.beta(j) < b.beta(j);
  }
  return a.gamma < b.gamma;
}

// max over the domain of min_{p ≠ t} (t − p); ≤ 0 means t never strictly wins.
double lead(const std::vector<AffineTerm>& terms, const std::vector<char>& alive,
            int t, const Polytope& domain) {
  const int n = domain.dim();
  LinearProgram lp = LinearProgram::free_variables(n + 1);
  lp.cost(n) = -1.0;  // maximize s
  Vector row(n + 1);
  for (int k = 0; k < domain.num_rows(); ++k) {
    row.head(n) = domain.A.row(k).transpose();
    row(n) = 0.0;
    lp.add_inequality(row, domain.b(k));
  }
  for (size_t p = 0; p < terms.size(); ++p) {
    if (static_cast<int>(p) == t || !alive[p]) continue;
    // s − (β_t − β_p)ᵀx ≤ γ_t − γ_p
    row.head(n) = terms[p].beta - terms[t].beta;
    row(n) = 1.0;
    lp.add_inequality(row, terms[t].gamma - terms[p].gamma);
  }
  const SolveResult r = solve_lp(lp);
  if (r.status == SolveStatus::Infeasible) {
    throw EmptyPolytopeError("prune_terms: empty domain");
  }
  if (r.status == SolveStatus::Unbounded) return kInf;
  return -r.value;
}

std::vector<AffineTerm> minkowski(const std::vector<AffineTerm>& a,
                                  const std::vector<AffineTerm>& b,
                                  long cap) {
  if (static_cast<long>(a.size()) * static_cast<long>(b.size()) > cap) {
    throw TermExplosionError("dc_decompose: term list exceeds the cap of " +
                             std::to_string(cap));
  }
  std::vector<AffineTerm> out;
  out.reserve(a.size() * b.size());
  for (const AffineTerm& s : a) {
    for (const AffineTerm& t : b) out.push_back({s.beta + t.beta, s.gamma + t.gamma});
  }
  return out;
}

AffineTerm zero_term(int n) { return {Vector::Zero(n), 0.0}; }

}  // namespace

std::vector<AffineTerm> prune_terms(std::vector<AffineTerm> terms,
                                    const Polytope& domain) {
  std::vector<AffineTerm> unique;
  for (AffineTerm& t : terms) {
    if (t.beta.size() != domain.dim()) {
      throw std::invalid_argument("prune_terms: dimension mismatch");
    }
    const bool dup = std::any_of(unique.begin(), unique.end(),
                                 [&](const AffineTerm& u) { return same_term(u, t); });
    if (!dup) unique.push_back(std::move(t));
  }
  const int k = static_cast<int>(unique.size());
  if (k <= 1) return unique;

  // A strict winner at some sample is needed; only the rest go to an LP.
  std::vector<char> needed(k, 0);
  std::vector<Vector> probes;
  try {
    probes = sample_uniform(domain, 256, 0);
  } catch (const std::runtime_error&) {
    // Thin or unbounded domain: every term gets an LP.
  }
  probes.push_back(chebyshev(domain).center);
  for (const Vector& x : probes) {
    int best = -1;
    double top = -kInf;
    double second = -kInf;
    for (int t = 0; t < k; ++t) {
      const double v = unique[t](x);
      if (v > top) {
        second = top;
        top = v;
        best = t;
      } else if (v > second) {
        second = v;
      }
    }
    if (top - second > kDominatedTol) needed[best] = 1;
  }

  std::vector<char> alive(k, 1);
  for (int t = 0; t < k; ++t) {
    if (needed[t]) continue;
    if (lead(unique, alive, t, domain) <= kDominatedTol) alive[t] = 0;
  }
  std::vector<AffineTerm> out;
  for (int t = 0; t < k; ++t) {
    if (alive[t]) out.push_back(std::move(unique[t]));
  }
  return out;
}

DcDecomposition dc_decompose(const std::vector<std::vector<int>>& lattice,
                             const std::vector<AffineTerm>& pieces,
                             const Polytope& domain, const DcOptions& options) {
  if (lattice.empty() || pieces.empty()) {
    throw std::invalid_argument("dc_decompose: empty lattice");
  }
  const int n = domain.dim();
  // min_{j∈S} ℓ_j = −max_{j∈S} (−ℓ_j) =: −h_S; identical sets give identical h.
  std::vector<std::vector<int>> sets;
  for (std::vector<int> s : lattice) {
    if (s.empty()) throw std::invalid_argument("dc_decompose: empty min-set");
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (int j : s) {
      if (j < 0 || j >= static_cast<int>(pieces.size())) {
        throw std::invalid_argument("dc_decompose: piece index out of range");
      }
    }
    if (std::find(sets.begin(), sets.end(), s) == sets.end()) sets.push_back(s);
  }
  std::vector<std::vector<AffineTerm>> h;
  for (const std::vector<int>& s : sets) {
    std::vector<AffineTerm> terms;
    for (int j : s) terms.push_back({-pieces[j].beta, -pieces[j].gamma});
    h.push_back(prune_terms(std::move(terms), domain));
  }

  // max_i (−h_i) = max_i Σ_{k≠i} h_k − Σ_k h_k.
  const int R = static_cast<int>(h.size());
  std::vector<std::vector<AffineTerm>> prefix(R + 1), suffix(R + 1);
  prefix[0] = {zero_term(n)};
  suffix[R] = {zero_term(n)};
  for (int i = 0; i < R; ++i) {
    prefix[i + 1] = prune_terms(minkowski(prefix[i], h[i], options.term_cap), domain);
  }
  for (int i = R - 1; i >= 0; --i) {
    suffix[i] = prune_terms(minkowski(suffix[i + 1], h[i], options.term_cap), domain);
  }
  std::vector<AffineTerm> p;
  for (int i = 0; i < R; ++i) {
    for (AffineTerm& t : prune_terms(minkowski(prefix[i], suffix[i + 1], options.term_cap),
                                     domain)) {
      p.push_back(std::move(t));
    }
    if (static_cast<long>(p.size()) > options.term_cap) {
      throw TermExplosionError("dc_decompose: term list exceeds the cap of " +
                               std::to_string(options.term_cap));
    }
  }
  DcDecomposition dc;
  dc.p_terms = prune_terms(std::move(p), domain);
  dc.q_terms = std::move(prefix[R]);
  std::sort(dc.p_terms.begin(), dc.p_terms.end(), lex_less);
  std::sort(dc.q_terms.begin(), dc.q_terms.end(), lex_less);

  if (options.samples > 0) {
    for (const Vector& x : sample_uniform(domain, options.samples, options.seed)) {
      const double want = lattice_eval(lattice, pieces, x);
      if (std::abs(dc.eval(x) - want) > 1e-7 * (1.0 + std::abs(want))) {
        throw NumericalError("dc_decompose: decomposition disagrees with the lattice form");
      }
    }
  }
  return dc;
}

}  // namespace maxcert
