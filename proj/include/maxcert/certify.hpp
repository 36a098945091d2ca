#pragma once

// Mixed-integer encodings of maxout networks and explicit PWA laws, and the
// MILPs for the maximum error and the Lipschitz constant of their difference.

#include <map>
#include <string>
#include <vector>

#include "maxcert/maxout.hpp"
#include "maxcert/mpc.hpp"

namespace maxcert {

/// Σ coef·var + constant over MiEncoding columns.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  static LinExpr var(int col, double coef = 1.0) { return {{{col, coef}}, 0.0}; }
  static LinExpr constant_expr(double c) { return {{}, c}; }
  LinExpr& add(const LinExpr& other, double scale = 1.0);
  LinExpr& add_term(int col, double coef);
  /// Value at a point over all columns.
  double value(const Vector& point) const;
};

/// A MILP assembled column block by column block.
class MiEncoding {
 public:
  /// Appends `count` columns with the given bounds; returns the first index.
  int add_block(const std::string& name, int count, double lo, double hi,
                bool binary = false);
  /// [first, count) of a named block. Throws std::out_of_range.
  std::pair<int, int> block(const std::string& name) const;
  bool has_block(const std::string& name) const;

  void add_le(const LinExpr& lhs, double rhs);  // lhs ≤ rhs
  void add_eq(const LinExpr& lhs, double rhs);  // lhs = rhs
  /// Σ binaries = 1 over the given columns.
  void add_one_hot(const std::vector<int>& cols);

  void set_bounds(int col, double lo, double hi);

  int num_cols() const { return static_cast<int>(lower_.size()); }
  int num_rows() const { return static_cast<int>(le_.size() + eq_.size()); }
  const std::vector<int>& binaries() const { return binaries_; }
  const std::vector<std::vector<int>>& one_hot_groups() const { return groups_; }

  /// Dense MILP with the given objective.
  MilpProblem to_milp(const LinExpr& objective, Sense sense) const;

 private:
  struct Row {
    LinExpr lhs;
    double rhs;
  };
  std::vector<double> lower_, upper_;
  std::vector<int> binaries_;
  std::vector<Row> le_, eq_;
  std::vector<std::vector<int>> groups_;
  std::map<std::string, std::pair<int, int>> blocks_;
};

/// Invalid big-M (or gain bound) setting detected by sampling.
class InvalidBigMError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NetworkEncoding {
  std::vector<int> x_cols;
  /// delta[i][r]: binary column of channel row r in hidden layer i.
  std::vector<std::vector<int>> delta;
  /// q[i][s]: output column of neuron s in hidden layer i.
  std::vector<std::vector<int>> q;
  /// Φ(x) as expressions of the columns.
  std::vector<LinExpr> output;
  /// Valid bounds on Φ over the tightening domain (±∞ when not tightened).
  Vector output_lo, output_hi;
};

struct BigMOptions {
  double big_m = 1e4;
  double eps = 0.0;
  /// When set, per-row constants are tightened by LP over this domain (never
  /// above big_m) and channels that cannot win are fixed.
  const Polytope* tighten_over = nullptr;
};

/// Output constraints: per neuron s and channel j, q_s ≤ z_j + b̄(1−δ_j),
/// q_s ≥ z_j + ε(1−δ_j), Σ_j δ_j = 1, with z = W q_prev + b and q^(0) = x.
NetworkEncoding encode_network_output(MiEncoding& enc,
                                      const std::vector<int>& x_cols,
                                      const MaxoutNetwork& net,
                                      const BigMOptions& options);

/// K_NN(x) as an m × n grid of expressions. Layer 1 uses ξ̃ = δ·W directly;
/// deeper layers get ξ̃ columns bounded by ±w_bound. Requires the output
/// encoding to have been built with ε > 0.
std::vector<std::vector<LinExpr>> encode_network_gain(
    MiEncoding& enc, const MaxoutNetwork& net, const NetworkEncoding& out,
    double w_bound);

struct PwaEncoding {
  std::vector<int> rho;
  std::vector<LinExpr> value;              // π(x)
  std::vector<std::vector<LinExpr>> gain;  // K_MPC(x)
  Vector value_lo, value_hi;
};

/// Region selectors ρ with Σρ = 1, big-M region membership and the selected
/// piece's value and gain. Big-M constants come from LPs over `domain`.
PwaEncoding encode_pwa_law(MiEncoding& enc, const std::vector<int>& x_cols,
                           const PwaFunction& pwa, const Polytope& domain);

enum class NormKind { One, Inf };

std::string to_string(NormKind alpha);
/// Parses "1", "inf" or "infinity".
NormKind parse_norm(const std::string& text);

struct CertifySettings {
  double big_m = 1e4;
  double w_bound = 1e4;
  double eps = 1e-5;
  double gap_tol = -1.0;
  long node_limit = 1'000'000;
  bool tighten = true;
  int preflight_samples = 1000;
  std::uint64_t seed = 0;
};

enum class CertificateKind { MaxError, Lipschitz };

std::string to_string(CertificateKind kind);

struct Certificate {
  CertificateKind kind = CertificateKind::MaxError;
  NormKind alpha = NormKind::Inf;
  double value = 0.0;
  Vector witness;
  /// Region of the PWA law selected at the witness.
  int witness_region = -1;
  double gap = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  long nodes = 0;
  long binaries = 0;
  CertifySettings settings;
  double wall_time = 0.0;
};

/// ē_α = max_{x ∈ domain} ‖π(x) − Φ(x)‖_α.
Certificate max_error(const PwaFunction& pwa, const MaxoutNetwork& net,
                      const Polytope& domain, NormKind alpha,
                      const CertifySettings& settings);

/// L_α = max_{x ∈ domain} ‖K_MPC(x) − K_NN(x)‖_α (induced norm), with
/// activation boundaries excluded by the ε-margin.
Certificate lipschitz(const PwaFunction& pwa, const MaxoutNetwork& net,
                      const Polytope& domain, NormKind alpha,
                      const CertifySettings& settings);

/// Vector α-norm and induced matrix α-norm.
double vector_norm(const Vector& v, NormKind alpha);
double matrix_norm(const Matrix& M, NormKind alpha);

/// Recomputes the certified quantity at the witness in plain arithmetic
/// (PWA piece from witness_region, network by forward pass / pattern gain).
double replay(const Certificate& cert, const PwaFunction& pwa,
              const MaxoutNetwork& net);

}  // namespace maxcert
