#pragma once

// Linear MPC: condensed parametric QP, point solutions, the explicit PWA law,
// and the Riccati / invariant-set helpers used to build terminal ingredients.

#include <string>
#include <vector>

#include "maxcert/geometry.hpp"

namespace maxcert {

/// The problem data cannot define a usable controller (non-PD Hessian,
/// inconsistent constraints, unstable closed loop, ...).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// x lies outside the feasible set of the OCP.
class InfeasibleStateError : public ModelError {
 public:
  using ModelError::ModelError;
};

struct OcpSpec {
  Matrix A, B;
  Matrix Q, R, P;
  int N = 1;
  Polytope X, U, T;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }

  /// Throws std::invalid_argument on inconsistent dimensions, N < 1,
  /// indefinite weights or T ⊄ X.
  void validate() const;
};

/// min_U ½UᵀHU + xᵀFU  s.t.  G U ≤ w + S x,  x ∈ state_set.
/// Rows with G = 0 constrain the state only and live in state_set.
struct ParametricQp {
  Matrix H;
  Matrix F;  // n × n_u
  Matrix G;
  Vector w;
  Matrix S;
  Polytope state_set;
  int input_dim = 1;

  int state_dim() const { return static_cast<int>(F.rows()); }
  int num_inputs() const { return static_cast<int>(H.rows()); }
  int num_rows() const { return static_cast<int>(G.rows()); }
};

ParametricQp condense(const OcpSpec& spec);

/// Full minimizer U*(x) of the condensed QP. Throws InfeasibleStateError.
Vector mpc_sequence(const ParametricQp& qp, const Eigen::Ref<const Vector>& x);

/// First input û*(0) = π(x). Throws InfeasibleStateError.
Vector mpc_point(const ParametricQp& qp, const Eigen::Ref<const Vector>& x);

/// Piecewise affine map x ↦ K_i x + b_i on closed polyhedral regions.
struct PwaFunction {
  std::vector<Polytope> regions;
  std::vector<Matrix> gains;
  std::vector<Vector> offsets;
  Polytope domain;

  int state_dim() const { return domain.dim(); }
  int output_dim() const {
    return gains.empty() ? 0 : static_cast<int>(gains.front().rows());
  }
  int num_regions() const { return static_cast<int>(regions.size()); }

  /// Index of the first region containing x within tol, or -1.
  int locate(const Eigen::Ref<const Vector>& x, double tol = 1e-8) const;
  /// Throws InfeasibleStateError when x lies in no region.
  Vector eval(const Eigen::Ref<const Vector>& x) const;
  Matrix gain(const Eigen::Ref<const Vector>& x) const;

  void validate() const;
};

struct ExplicitMpcReport {
  long candidates = 0;
  long licq_skipped = 0;
  int regions_before_merge = 0;
  std::vector<std::string> warnings;
};

/// Explicit solution by active-set enumeration. Regions with the same law
/// for û(0) are merged when their union is convex.
PwaFunction explicit_mpc(const ParametricQp& qp,
                         ExplicitMpcReport* report = nullptr);

/// The domain F_N stored with the explicit law.
const Polytope& feasible_set(const PwaFunction& pwa);

/// Largest jump between pieces of intersecting regions, computed exactly by LP
/// over every pairwise intersection.
double max_discontinuity(const PwaFunction& pwa);

Matrix dare(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R);

/// ‖P − Q − AᵀPA + AᵀPB(R+BᵀPB)⁻¹BᵀPA‖_∞ (max abs entry).
double dare_residual(const Matrix& A, const Matrix& B, const Matrix& Q,
                     const Matrix& R, const Matrix& P);

/// u = K x for the infinite-horizon LQR with cost matrix P.
Matrix lqr_gain(const Matrix& A, const Matrix& B, const Matrix& R,
                const Matrix& P);

/// Maximal positively invariant subset of `constraints` for x⁺ = A_cl x.
Polytope max_output_admissible_set(const Matrix& A_cl,
                                   const Polytope& constraints,
                                   int max_steps = 500);

/// Scalar system x⁺ = 1.2x + u with N = 2 and T = [−1, 1].
OcpSpec example1_spec();
/// Double integrator with N = 3, DARE terminal cost and MOAS terminal set.
OcpSpec example2_spec();

}  // namespace maxcert
