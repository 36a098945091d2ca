#include <algorithm>
#include <cmath>
#include <numeric>

#include "maxcert/mpc.hpp"

namespace maxcert {

namespace {

constexpr double kLawTol = 1e-9;

struct Piece {
  Polytope region;
  Matrix K;
  Vector b;
};

// Indices of G rows that are neither duplicates nor redundant in the joint
// (U, x) space.
std::vector<int> irredundant_rows(const ParametricQp& qp) {
  const int nu = qp.num_inputs();
  const int n = qp.state_dim();
  const int m = qp.num_rows();
  Matrix joint(m, nu + n);
  joint << qp.G, -qp.S;
  Vector rhs = qp.w;
  for (int i = 0; i < m; ++i) {
    const double s = joint.row(i).norm();
    joint.row(i) /= s;
    rhs(i) /= s;
  }
  Polytope state_rows(Matrix::Zero(qp.state_set.num_rows(), nu + n),
                      qp.state_set.b);
  state_rows.A.rightCols(n) = qp.state_set.A;

  std::vector<char> keep(m, 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < i && keep[i]; ++j) {
      if (keep[j] && (joint.row(i) - joint.row(j)).cwiseAbs().maxCoeff() < 1e-12) {
        if (rhs(i) >= rhs(j)) {
          keep[i] = 0;
        } else {
          keep[j] = 0;
        }
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    if (!keep[i]) continue;
    Polytope rest = state_rows;
    for (int j = 0; j < m; ++j) {
      if (j != i && keep[j]) rest.add_row(joint.row(j).transpose(), rhs(j));
    }
    std::optional<double> s = support(rest, joint.row(i).transpose());
    if (!s) throw ModelError("explicit_mpc: the parametric QP has no feasible state");
    if (*s <= rhs(i) + 1e-9) keep[i] = 0;
  }
  std::vector<int> rows;
  for (int i = 0; i < m; ++i) {
    if (keep[i]) rows.push_back(i);
  }
  return rows;
}

// Appends a x ≤ rhs unless the row is numerically zero. Returns false when a
// zero row is violated, i.e. the set is empty.
bool push_row(Polytope& p, const Vector& a, double rhs) {
  const double s = a.cwiseAbs().maxCoeff();
  if (s < 1e-12) return rhs >= -1e-9;
  p.add_row(a, rhs);
  return true;
}

bool next_combination(std::vector<int>& idx, int k) {
  const int r = static_cast<int>(idx.size());
  for (int i = r - 1; i >= 0; --i) {
    if (idx[i] < k - r + i) {
      ++idx[i];
      for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

bool same_law(const Piece& a, const Piece& b) {
  return (a.K - b.K).cwiseAbs().maxCoeff() <= kLawTol &&
         (a.b - b.b).cwiseAbs().maxCoeff() <= kLawTol;
}

// Rows of `from` that hold on all of `over`.
std::vector<int> valid_rows(const Polytope& from, const Polytope& over) {
  std::vector<int> rows;
  for (int i = 0; i < from.num_rows(); ++i) {
    std::optional<double> s = support(over, from.A.row(i).transpose());
    const double tol = 1e-9 * (1.0 + std::abs(from.b(i)));
    if (s && *s <= from.b(i) + tol) rows.push_back(i);
  }
  return rows;
}

// Convex union P ∪ Q as a polytope, if the union is convex.
std::optional<Polytope> convex_union(const Polytope& P, const Polytope& Q) {
  const std::vector<int> keep_p = valid_rows(P, Q);
  const std::vector<int> keep_q = valid_rows(Q, P);
  Polytope env(P.A(keep_p, Eigen::all), P.b(keep_p));
  env = env.intersect(Polytope(Q.A(keep_q, Eigen::all), Q.b(keep_q)));
  // env \ P is covered by the slabs beyond each dropped row of P.
  for (int i = 0; i < P.num_rows(); ++i) {
    if (std::binary_search(keep_p.begin(), keep_p.end(), i)) continue;
    Polytope beyond = env;
    beyond.add_row(-P.A.row(i).transpose(), -P.b(i));
    if (!contains_set(Q, beyond)) return std::nullopt;
  }
  return remove_redundant(env);
}

void merge_pieces(std::vector<Piece>& pieces) {
  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t i = 0; i < pieces.size() && !merged; ++i) {
      for (size_t j = i + 1; j < pieces.size() && !merged; ++j) {
        if (!same_law(pieces[i], pieces[j])) continue;
        std::optional<Polytope> u =
            convex_union(pieces[i].region, pieces[j].region);
        if (!u) continue;
        pieces[i].region = std::move(*u);
        pieces.erase(pieces.begin() + static_cast<long>(j));
        merged = true;
      }
    }
  }
}

Polytope union_hull(const std::vector<Piece>& pieces) {
  const int n = pieces.front().region.dim();
  Polytope candidates = Polytope::whole_space(n);
  for (const Piece& p : pieces) candidates = candidates.intersect(p.region);
  Polytope hull = Polytope::whole_space(n);
  for (int i = 0; i < candidates.num_rows(); ++i) {
    bool valid = true;
    for (const Piece& p : pieces) {
      std::optional<double> s = support(p.region, candidates.A.row(i).transpose());
      if (!s || *s > candidates.b(i) + 1e-9 * (1.0 + std::abs(candidates.b(i)))) {
        valid = false;
        break;
      }
    }
    if (valid) hull.add_row(candidates.A.row(i).transpose(), candidates.b(i));
  }
  return remove_redundant(hull);
}

}  // namespace

PwaFunction explicit_mpc(const ParametricQp& qp, ExplicitMpcReport* report) {
  const int nu = qp.num_inputs();
  const int n = qp.state_dim();
  const int m = qp.input_dim;
  Eigen::LLT<Matrix> llt(qp.H);
  if (llt.info() != Eigen::Success) {
    throw ModelError("explicit_mpc: Hessian is not positive definite");
  }
  const Matrix Hinv = llt.solve(Matrix::Identity(nu, nu));
  const Matrix HinvFt = Hinv * qp.F.transpose();

  const std::vector<int> rows = irredundant_rows(qp);
  const int k = static_cast<int>(rows.size());
  const Matrix G = qp.G(rows, Eigen::all);
  const Matrix S = qp.S(rows, Eigen::all);
  const Vector w = qp.w(rows);

  ExplicitMpcReport local;
  ExplicitMpcReport& rep = report ? *report : local;
  rep = ExplicitMpcReport{};

  std::vector<Piece> pieces;
  for (int size = 0; size <= std::min(nu, k); ++size) {
    std::vector<int> act(size);
    std::iota(act.begin(), act.end(), 0);
    do {
      ++rep.candidates;
      std::vector<char> is_active(k, 0);
      for (int a : act) is_active[a] = 1;
      const Matrix GA = G(act, Eigen::all);
      Matrix KU = -HinvFt;
      Vector kU = Vector::Zero(nu);
      Matrix Llam(size, n);
      Vector llam(size);
      if (size > 0) {
        Eigen::FullPivLU<Matrix> rank(GA);
        rank.setThreshold(1e-10);
        if (rank.rank() < size) {
          ++rep.licq_skipped;
          continue;
        }
        const Matrix M = GA * Hinv * GA.transpose();
        Eigen::LLT<Matrix> mllt(M);
        Llam = -mllt.solve(S(act, Eigen::all) + GA * HinvFt);
        llam = -mllt.solve(w(act));
        KU -= Hinv * GA.transpose() * Llam;
        kU = -Hinv * GA.transpose() * llam;
      }

      Polytope region = qp.state_set;
      bool nonempty = true;
      for (int r = 0; r < size && nonempty; ++r) {
        nonempty = push_row(region, -Llam.row(r).transpose(), llam(r));
      }
      for (int i = 0; i < k && nonempty; ++i) {
        if (is_active[i]) continue;
        const Vector a = (G.row(i) * KU - S.row(i)).transpose();
        nonempty = push_row(region, a, w(i) - G.row(i).dot(kU));
      }
      if (!nonempty || !is_full_dimensional(region)) continue;
      pieces.push_back(
          {remove_redundant(region), KU.topRows(m), kU.head(m)});
    } while (next_combination(act, k));
  }
  rep.regions_before_merge = static_cast<int>(pieces.size());
  if (rep.licq_skipped > 0) {
    rep.warnings.push_back(std::to_string(rep.licq_skipped) +
                           " active sets skipped (linearly dependent rows)");
  }
  if (pieces.empty()) throw ModelError("explicit_mpc: no full-dimensional region");

  merge_pieces(pieces);

  // Canonical order: lexicographic in the Chebyshev centres.
  std::vector<Vector> centers;
  for (const Piece& p : pieces) centers.push_back(chebyshev(p.region).center);
  std::vector<int> order(pieces.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::lexicographical_compare(centers[a].begin(), centers[a].end(),
                                        centers[b].begin(), centers[b].end());
  });

  PwaFunction pwa;
  for (int i : order) {
    pwa.regions.push_back(pieces[i].region);
    pwa.gains.push_back(pieces[i].K);
    pwa.offsets.push_back(pieces[i].b);
  }
  pwa.domain = union_hull(pieces);
  return pwa;
}

}  // namespace maxcert
