#pragma once

// Dense LP / strictly convex QP / branch-and-bound MILP kernel.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace maxcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised when a factorization breaks down and cannot be recovered.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// minimize costᵀx  s.t.  A x ≤ b,  C x = d,  lower ≤ x ≤ upper.
struct LinearProgram {
  Vector cost;
  Matrix A;
  Vector b;
  Matrix C;
  Vector d;
  Vector lower;
  Vector upper;

  /// An LP over `n` free variables with zero cost and no rows.
  static LinearProgram free_variables(int n);

  int num_vars() const { return static_cast<int>(cost.size()); }
  int num_ineq() const { return static_cast<int>(A.rows()); }
  int num_eq() const { return static_cast<int>(C.rows()); }

  void add_inequality(const Eigen::Ref<const Vector>& row, double rhs);
  void add_equality(const Eigen::Ref<const Vector>& row, double rhs);

  /// Throws std::invalid_argument on inconsistent dimensions or non-finite
  /// right-hand sides.
  void validate() const;
};

/// minimize ½ xᵀ H x + linearᵀx  s.t.  A x ≤ b,  C x = d.
struct QuadraticProgram {
  Matrix hessian;
  Vector linear;
  Matrix A;
  Vector b;
  Matrix C;
  Vector d;

  int num_vars() const { return static_cast<int>(linear.size()); }
  void validate() const;
};

enum class Sense { Minimize, Maximize };

struct MilpProblem {
  LinearProgram base;
  std::vector<int> binaries;
  Sense sense = Sense::Minimize;

  void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, GapLimit };

std::string to_string(SolveStatus status);

/// Simplex basis snapshot; columns [0, n) are structural, [n, n + rows) are
/// row activities (inequalities first, then equalities).
struct Basis {
  std::vector<int> basic;
  std::vector<std::int8_t> at_upper;  // per column, meaningful if nonbasic
  /// Inverse of the basis matrix, when the solver kept one.
  std::shared_ptr<const Matrix> inverse;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  Vector point;
  double value = 0.0;
  /// Multipliers λ ≥ 0 of A x ≤ b (LP and QP).
  Vector dual_ineq;
  /// Multipliers of C x = d.
  Vector dual_eq;
  /// Reduced costs cost + Aᵀλ + Cᵀν (LP only).
  Vector reduced_cost;
  /// Active inequality rows (QP: final working set; LP: rows at bound).
  std::vector<int> active;
  /// Absolute bound gap (MILP only).
  double gap = 0.0;
  long nodes = 0;
  long iterations = 0;
  std::optional<Basis> basis;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

struct Tolerances {
  static constexpr double kFeasibility = 1e-8;
  static constexpr double kIntegrality = 1e-6;
  static constexpr double kRelativeGap = 1e-9;
};

/// Bounded-variable primal simplex (Dantzig pricing, Bland fallback on
/// stalling). `warm` may carry a basis from a related problem with the same
/// row/column layout.
SolveResult solve_lp(const LinearProgram& lp,
                     const Basis* warm = nullptr);

/// Primal active-set method. `working_set` seeds the initial working set of
/// inequality rows; it is used when the resulting equality-constrained point
/// is feasible, otherwise a Phase-1 LP provides the start.
SolveResult solve_qp(const QuadraticProgram& qp,
                     const std::vector<int>& working_set = {});

struct MilpOptions {
  /// Absolute gap; negative selects 1e-9·(1 + |incumbent|).
  double gap_tol = -1.0;
  long node_limit = 1'000'000;
};

/// Best-first branch and bound on most-fractional binaries. Deterministic:
/// identical inputs give bitwise identical results.
SolveResult solve_milp(const MilpProblem& problem,
                       const MilpOptions& options = {});

}  // namespace maxcert
