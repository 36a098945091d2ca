#include "maxcert/geometry.hpp"

#include <cmath>
#include <random>

namespace maxcert {

namespace {

constexpr double kRadiusCap = 1e9;

LinearProgram feasibility_lp(const Polytope& p) {
  LinearProgram lp = LinearProgram::free_variables(p.dim());
  lp.A = p.A;
  lp.b = p.b;
  return lp;
}

}  // namespace

Polytope::Polytope(Matrix a, Vector rhs) : A(std::move(a)), b(std::move(rhs)) {
  if (A.rows() != b.size()) {
    throw std::invalid_argument("Polytope: row count and offsets differ");
  }
}

Polytope Polytope::whole_space(int n) {
  return Polytope(Matrix::Zero(0, n), Vector::Zero(0));
}

Polytope Polytope::box(const Eigen::Ref<const Vector>& lo,
                       const Eigen::Ref<const Vector>& hi) {
  const int n = static_cast<int>(lo.size());
  if (hi.size() != n) throw std::invalid_argument("Polytope::box: sizes");
  Matrix A(2 * n, n);
  A << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  Vector b(2 * n);
  b << hi, -lo;
  return Polytope(std::move(A), std::move(b));
}

Polytope Polytope::intersect(const Polytope& other) const {
  if (other.dim() != dim()) {
    throw std::invalid_argument("Polytope::intersect: dimension mismatch");
  }
  Matrix a(num_rows() + other.num_rows(), dim());
  a << A, other.A;
  Vector rhs(b.size() + other.b.size());
  rhs << b, other.b;
  return Polytope(std::move(a), std::move(rhs));
}

void Polytope::add_row(const Eigen::Ref<const Vector>& a, double rhs) {
  if (a.size() != dim()) {
    throw std::invalid_argument("Polytope::add_row: dimension mismatch");
  }
  A.conservativeResize(A.rows() + 1, Eigen::NoChange);
  A.row(A.rows() - 1) = a.transpose();
  b.conservativeResize(b.size() + 1);
  b(b.size() - 1) = rhs;
}

void Polytope::validate() const {
  if (A.rows() != b.size()) {
    throw std::invalid_argument("Polytope: row count and offsets differ");
  }
  if (!A.allFinite() || !b.allFinite()) {
    throw std::invalid_argument("Polytope: non-finite data");
  }
  for (int i = 0; i < num_rows(); ++i) {
    if (A.row(i).cwiseAbs().maxCoeff() == 0.0 && b(i) < 0.0) {
      throw std::invalid_argument(
          "Polytope: all-zero row with negative offset");
    }
  }
}

bool is_empty(const Polytope& p) {
  return solve_lp(feasibility_lp(p)).status == SolveStatus::Infeasible;
}

ChebyshevBall chebyshev(const Polytope& p) {
  const int n = p.dim();
  // Variables (x, r): maximize r s.t. a_i x + ‖a_i‖ r ≤ b_i, 0 ≤ r ≤ cap.
  LinearProgram lp = LinearProgram::free_variables(n + 1);
  lp.cost(n) = -1.0;
  lp.lower(n) = 0.0;
  lp.upper(n) = kRadiusCap;
  lp.A.resize(p.num_rows(), n + 1);
  lp.A.leftCols(n) = p.A;
  lp.A.col(n) = p.A.rowwise().norm();
  lp.b = p.b;
  SolveResult r = solve_lp(lp);
  if (r.status == SolveStatus::Infeasible) {
    throw EmptyPolytopeError("chebyshev: polytope is empty");
  }
  if (r.status != SolveStatus::Optimal) {
    throw NumericalError("chebyshev: unexpected LP status");
  }
  return {r.point.head(n), r.point(n)};
}

bool is_full_dimensional(const Polytope& p) {
  try {
    return chebyshev(p).radius > kFullDimRadius;
  } catch (const EmptyPolytopeError&) {
    return false;
  }
}

std::optional<double> support(const Polytope& p,
                              const Eigen::Ref<const Vector>& dir) {
  LinearProgram lp = feasibility_lp(p);
  lp.cost = -dir;
  SolveResult r = solve_lp(lp);
  if (r.status == SolveStatus::Infeasible) return std::nullopt;
  if (r.status == SolveStatus::Unbounded) return kInf;
  return -r.value;
}

Vector support_point(const Polytope& p, const Eigen::Ref<const Vector>& dir) {
  LinearProgram lp = feasibility_lp(p);
  lp.cost = -dir;
  SolveResult r = solve_lp(lp);
  if (r.status == SolveStatus::Infeasible) {
    throw EmptyPolytopeError("support_point: polytope is empty");
  }
  if (r.status != SolveStatus::Optimal) {
    throw std::invalid_argument("support_point: unbounded direction");
  }
  return r.point;
}

Polytope remove_redundant(const Polytope& p) {
  const int m = p.num_rows();
  std::vector<char> keep(m, 1);
  // Exact duplicates after normalization go first.
  Matrix normalized = p.A;
  Vector nb = p.b;
  for (int i = 0; i < m; ++i) {
    const double s = p.A.row(i).norm();
    if (s == 0.0) {
      keep[i] = 0;  // 0 ≤ b with b ≥ 0 by validity
      continue;
    }
    normalized.row(i) /= s;
    nb(i) /= s;
  }
  for (int i = 0; i < m; ++i) {
    if (!keep[i]) continue;
    for (int j = i + 1; j < m; ++j) {
      if (keep[j] &&
          (normalized.row(i) - normalized.row(j)).cwiseAbs().maxCoeff() <
              1e-12) {
        if (nb(j) >= nb(i)) {
          keep[j] = 0;
        } else {
          keep[i] = 0;
          break;
        }
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    if (!keep[i]) continue;
    Polytope rest(Matrix(0, p.dim()), Vector(0));
    for (int j = 0; j < m; ++j) {
      if (j != i && keep[j]) rest.add_row(normalized.row(j).transpose(), nb(j));
    }
    std::optional<double> s = support(rest, normalized.row(i).transpose());
    if (!s) {
      throw EmptyPolytopeError("remove_redundant: polytope is empty");
    }
    if (*s <= nb(i) + 1e-9) keep[i] = 0;
  }
  Polytope out(Matrix(0, p.dim()), Vector(0));
  for (int i = 0; i < m; ++i) {
    if (keep[i]) out.add_row(p.A.row(i).transpose(), p.b(i));
  }
  return out;
}

bool contains(const Polytope& p, const Eigen::Ref<const Vector>& x,
              double tol) {
  if (x.size() != p.dim()) {
    throw std::invalid_argument("contains: dimension mismatch");
  }
  if (p.num_rows() == 0) return true;
  return ((p.A * x - p.b).array() <= tol).all();
}

bool contains_set(const Polytope& outer, const Polytope& inner, double tol) {
  for (int i = 0; i < outer.num_rows(); ++i) {
    std::optional<double> s = support(inner, outer.A.row(i).transpose());
    if (!s) return true;
    if (*s > outer.b(i) + tol * (1.0 + std::abs(outer.b(i)))) return false;
  }
  return true;
}

std::pair<Vector, Vector> bounding_box(const Polytope& p) {
  const int n = p.dim();
  Vector lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    Vector e = Vector::Unit(n, j);
    std::optional<double> up = support(p, e);
    std::optional<double> dn = support(p, -e);
    if (!up || !dn) throw EmptyPolytopeError("bounding_box: empty polytope");
    if (*up == kInf || *dn == kInf) {
      throw std::invalid_argument("bounding_box: unbounded polytope");
    }
    hi(j) = *up;
    lo(j) = -*dn;
  }
  return {lo, hi};
}

std::vector<Vector> sample_uniform(const Polytope& p, int count,
                                   std::uint64_t seed) {
  auto [lo, hi] = bounding_box(p);
  std::mt19937_64 rng(seed);
  std::vector<Vector> out;
  out.reserve(count);
  long draws = 0;
  Vector x(p.dim());
  while (static_cast<int>(out.size()) < count) {
    for (int j = 0; j < x.size(); ++j) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      x(j) = lo(j) + (hi(j) - lo(j)) * u;
    }
    ++draws;
    if (contains(p, x, 0.0)) out.push_back(x);
    if (draws >= 10000 && out.size() * 10000 < static_cast<size_t>(draws)) {
      throw std::runtime_error("sample_uniform: acceptance rate below 1e-4");
    }
  }
  return out;
}

}  // namespace maxcert
