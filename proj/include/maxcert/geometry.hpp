#pragma once

// H-representation polytopes {x : A x ≤ b}. Every query reduces to an LP.

#include <cstdint>
#include <optional>
#include <vector>

#include "maxcert/optim.hpp"

namespace maxcert {

class EmptyPolytopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Polytope {
  Matrix A;
  Vector b;

  Polytope() = default;
  Polytope(Matrix a, Vector rhs);

  /// The unconstrained set R^n.
  static Polytope whole_space(int n);
  /// Axis-aligned box lo ≤ x ≤ hi.
  static Polytope box(const Eigen::Ref<const Vector>& lo,
                      const Eigen::Ref<const Vector>& hi);

  int dim() const { return static_cast<int>(A.cols()); }
  int num_rows() const { return static_cast<int>(A.rows()); }

  /// Stacks the rows of both polytopes (set intersection).
  Polytope intersect(const Polytope& other) const;
  void add_row(const Eigen::Ref<const Vector>& a, double rhs);

  /// Throws std::invalid_argument on non-finite data or an all-zero row with
  /// negative offset.
  void validate() const;
};

bool is_empty(const Polytope& p);

struct ChebyshevBall {
  Vector center;
  double radius = 0.0;
};

/// Largest inscribed ball (radius capped at 1e9 for unbounded sets). Throws
/// EmptyPolytopeError when p is empty.
ChebyshevBall chebyshev(const Polytope& p);

/// Radius threshold certifying a nonempty interior.
inline constexpr double kFullDimRadius = 1e-9;

bool is_full_dimensional(const Polytope& p);

/// Drops rows whose removal leaves the set unchanged (one LP per row).
Polytope remove_redundant(const Polytope& p);

/// True iff A x ≤ b + tol componentwise. Throws std::invalid_argument on a
/// dimension mismatch.
bool contains(const Polytope& p, const Eigen::Ref<const Vector>& x,
              double tol = 1e-8);

/// max dirᵀx over p: nullopt if p is empty, +∞ if unbounded.
std::optional<double> support(const Polytope& p,
                              const Eigen::Ref<const Vector>& dir);

/// Maximizer of dirᵀx over a nonempty bounded p.
Vector support_point(const Polytope& p, const Eigen::Ref<const Vector>& dir);

/// inner ⊆ outer, checked row by row on outer.
bool contains_set(const Polytope& outer, const Polytope& inner,
                  double tol = 1e-9);

/// Componentwise bounding box of a bounded, nonempty polytope.
std::pair<Vector, Vector> bounding_box(const Polytope& p);

/// `count` points drawn uniformly from a bounded polytope by rejection from
/// its bounding box (mt19937_64 seeded with `seed`). Throws
/// std::runtime_error if the acceptance rate drops below 1e-4.
std::vector<Vector> sample_uniform(const Polytope& p, int count,
                                   std::uint64_t seed);

}  // namespace maxcert
