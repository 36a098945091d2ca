#pragma once

// Maxout networks that represent a continuous PWA law exactly: a lattice
// (max-min) form of the law, its rewriting as a difference of two convex
// max-of-affine functions, and the one-hidden-layer network with one neuron
// per convex part.

#include <vector>

#include "maxcert/certify.hpp"

namespace maxcert {

/// βᵀx + γ.
struct AffineTerm {
  Vector beta;
  double gamma = 0.0;

  double operator()(const Eigen::Ref<const Vector>& x) const {
    return beta.dot(x) + gamma;
  }
};

/// max(p_terms) − max(q_terms) for one output dimension.
struct DcDecomposition {
  std::vector<AffineTerm> p_terms;
  std::vector<AffineTerm> q_terms;

  double eval(const Eigen::Ref<const Vector>& x) const;
};

/// The sampled lattice identity failed (the law is not continuous).
class LatticeError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// A term list grew past the configured cap.
class TermExplosionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The synthesized network failed its exactness certificate.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Affine piece of output `dim` on region i.
std::vector<AffineTerm> pieces(const PwaFunction& pwa, int dim);

/// S_i = { j : min over R_i of ℓ_j − ℓ_i ≥ −1e-9 }, so that
/// F = max_i min_{j ∈ S_i} ℓ_j. Checked on `samples` domain points.
std::vector<std::vector<int>> lattice_rep(const PwaFunction& pwa, int dim,
                                          int samples = 1000,
                                          std::uint64_t seed = 0);

/// Max-min value of a lattice form at x.
double lattice_eval(const std::vector<std::vector<int>>& lattice,
                    const std::vector<AffineTerm>& pieces,
                    const Eigen::Ref<const Vector>& x);

struct DcOptions {
  long term_cap = 10'000;
  int samples = 1000;
  std::uint64_t seed = 0;
};

/// Drops duplicate terms (all coefficients within 1e-9) and terms that never
/// strictly exceed the others on the domain. max(terms) is unchanged there.
std::vector<AffineTerm> prune_terms(std::vector<AffineTerm> terms,
                                    const Polytope& domain);

/// Rewrites the lattice form as max(p_terms) − max(q_terms) on the domain,
/// pruning after every sum. Terms come out sorted lexicographically.
DcDecomposition dc_decompose(const std::vector<std::vector<int>>& lattice,
                             const std::vector<AffineTerm>& pieces,
                             const Polytope& domain,
                             const DcOptions& options = {});

struct ExactOptions {
  DcOptions dc;
  /// Run the max-error MILP on the result and require ē_∞ ≤ tolerance.
  bool certify = true;
  double tolerance = 1e-6;
  CertifySettings settings;
};

struct ExactReport {
  int p1 = 0;
  long num_params = 0;
  /// Per output: sizes of the convex parts before padding.
  std::vector<int> p_counts, q_counts;
  double max_error = -1.0;  // −1 when not certified
};

/// Two neurons per output (the convex parts), padded to a common channel
/// count p_1 with copies of the first term shifted down by one, W_out blocks
/// (1, −1), b_out = 0.
MaxoutNetwork network_from_dc(const std::vector<DcDecomposition>& parts,
                              int input_dim);

MaxoutNetwork build_exact_type1(const PwaFunction& pwa,
                                const ExactOptions& options = {},
                                ExactReport* report = nullptr);

/// Hinge construction for a 1-D scalar law: each slope change c at t adds
/// c·max(0, t − x) to the convex part of its sign, starting from the
/// rightmost piece. Channels are listed left to right.
MaxoutNetwork build_exact_1d(const PwaFunction& pwa);

}  // namespace maxcert
