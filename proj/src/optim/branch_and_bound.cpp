#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>

#include "maxcert/optim.hpp"

namespace maxcert {
namespace {

struct Node {
  double bound;
  long id;
  std::vector<std::int8_t> lo;  // per binary
  std::vector<std::int8_t> hi;
  std::shared_ptr<const Basis> warm;
};

struct NodeOrder {
  // Best bound first (minimization), FIFO among equal bounds.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

// Eliminates fixed binaries so the incumbent is evaluated on an LP without
// big-M columns.
SolveResult polish(const LinearProgram& lp, const std::vector<int>& binaries,
                   const std::vector<std::int8_t>& values) {
  const int n = lp.num_vars();
  std::vector<int> keep;
  std::vector<char> is_bin(n, 0);
  Vector fixed = Vector::Zero(n);
  for (size_t k = 0; k < binaries.size(); ++k) {
    is_bin[binaries[k]] = 1;
    fixed(binaries[k]) = values[k];
  }
  for (int j = 0; j < n; ++j) {
    if (!is_bin[j]) keep.push_back(j);
  }
  LinearProgram reduced;
  const int nk = static_cast<int>(keep.size());
  reduced.cost.resize(nk);
  reduced.lower.resize(nk);
  reduced.upper.resize(nk);
  reduced.A.resize(lp.num_ineq(), nk);
  reduced.C.resize(lp.num_eq(), nk);
  for (int k = 0; k < nk; ++k) {
    reduced.cost(k) = lp.cost(keep[k]);
    reduced.lower(k) = lp.lower(keep[k]);
    reduced.upper(k) = lp.upper(keep[k]);
    reduced.A.col(k) = lp.A.col(keep[k]);
    reduced.C.col(k) = lp.C.col(keep[k]);
  }
  reduced.b = lp.b - lp.A * fixed;
  reduced.d = lp.d - lp.C * fixed;
  SolveResult r = solve_lp(reduced);
  if (r.status != SolveStatus::Optimal) return r;
  Vector full = fixed;
  for (int k = 0; k < nk; ++k) full(keep[k]) = r.point(k);
  r.point = full;
  r.value = lp.cost.dot(full);
  r.basis.reset();
  return r;
}

}  // namespace

SolveResult solve_milp(const MilpProblem& problem, const MilpOptions& options) {
  problem.validate();
  LinearProgram lp = problem.base;
  const bool maximize = problem.sense == Sense::Maximize;
  if (maximize) lp.cost = -lp.cost;

  std::vector<int> bins = problem.binaries;
  std::sort(bins.begin(), bins.end());
  bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
  const int nb = static_cast<int>(bins.size());

  auto gap_of = [&](double incumbent) {
    if (options.gap_tol >= 0) return options.gap_tol;
    return Tolerances::kRelativeGap * (1.0 + std::abs(incumbent));
  };

  double incumbent = kInf;
  Vector best_point;
  long nodes = 0;
  long next_id = 0;
  bool root_unbounded = false;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  {
    Node root;
    root.bound = -kInf;
    root.id = next_id++;
    root.lo.resize(nb);
    root.hi.resize(nb);
    for (int k = 0; k < nb; ++k) {
      root.lo[k] = lp.lower(bins[k]) > 0.5 ? 1 : 0;
      root.hi[k] = lp.upper(bins[k]) < 0.5 ? 0 : 1;
    }
    open.push(std::move(root));
  }

  LinearProgram node_lp = lp;
  double open_bound = -kInf;
  double closing_bound = kInf;
  bool limit_hit = false;
  while (!open.empty()) {
    if (incumbent < kInf && open.top().bound >= incumbent - gap_of(incumbent)) {
      // Every remaining node is dominated.
      closing_bound = open.top().bound;
      while (!open.empty()) open.pop();
      break;
    }
    if (nodes >= options.node_limit) {
      limit_hit = true;
      open_bound = open.top().bound;
      break;
    }
    Node node = open.top();
    open.pop();
    ++nodes;

    for (int k = 0; k < nb; ++k) {
      node_lp.lower(bins[k]) = node.lo[k];
      node_lp.upper(bins[k]) = node.hi[k];
    }
    SolveResult relax = solve_lp(node_lp, node.warm.get());
    if (relax.status == SolveStatus::Infeasible) continue;
    if (relax.status == SolveStatus::Unbounded) {
      if (nodes == 1) {
        root_unbounded = true;
        break;
      }
      continue;
    }
    const double bound = std::max(node.bound, relax.value);
    if (incumbent < kInf && bound >= incumbent - gap_of(incumbent)) continue;

    int branch = -1;
    double most = 0.0;
    for (int k = 0; k < nb; ++k) {
      if (node.lo[k] == node.hi[k]) continue;  // fixed; drift is not branchable
      const double v = relax.point(bins[k]);
      const double frac = std::min(std::abs(v), std::abs(1.0 - v));
      if (frac > most) {
        most = frac;
        branch = k;
      }
    }

    if (most <= Tolerances::kIntegrality) {
      std::vector<std::int8_t> values(nb);
      for (int k = 0; k < nb; ++k) {
        values[k] = relax.point(bins[k]) > 0.5 ? 1 : 0;
      }
      SolveResult fixed = polish(lp, bins, values);
      if (fixed.status == SolveStatus::Optimal && fixed.value < incumbent) {
        incumbent = fixed.value;
        best_point = fixed.point;
        for (int k = 0; k < nb; ++k) best_point(bins[k]) = values[k];
      }
      // Big-M leakage: residual fractionality may still hide better points.
      const bool dominated = fixed.status == SolveStatus::Optimal &&
                             bound >= fixed.value - gap_of(fixed.value);
      if (most <= 1e-13 || dominated) continue;
    }

    auto shared = relax.basis
                      ? std::make_shared<const Basis>(std::move(*relax.basis))
                      : nullptr;
    if (open.size() > 20000) shared.reset();
    if (shared && open.size() > 500) {
      // Keep memory bounded on wide trees; children refactor instead.
      Basis slim = *shared;
      slim.inverse.reset();
      shared = std::make_shared<const Basis>(std::move(slim));
    }
    Node down = node;
    down.bound = bound;
    down.id = next_id++;
    down.hi[branch] = 0;
    down.warm = shared;
    Node up = std::move(node);
    up.bound = bound;
    up.id = next_id++;
    up.lo[branch] = 1;
    up.warm = shared;
    open.push(std::move(down));
    open.push(std::move(up));
  }

  SolveResult result;
  result.nodes = nodes;
  const double sign = maximize ? -1.0 : 1.0;
  if (root_unbounded) {
    result.status = SolveStatus::Unbounded;
    return result;
  }
  if (limit_hit) {
    result.status = SolveStatus::GapLimit;
    if (incumbent < kInf) {
      result.point = best_point;
      result.value = sign * incumbent;
      result.gap = std::max(0.0, incumbent - open_bound);
    } else {
      result.gap = kInf;
    }
    return result;
  }
  if (incumbent == kInf) {
    result.status = SolveStatus::Infeasible;
    return result;
  }
  result.status = SolveStatus::Optimal;
  result.point = best_point;
  result.value = sign * incumbent;
  result.gap = closing_bound < kInf ? std::max(0.0, incumbent - closing_bound)
                                    : 0.0;
  return result;
}

}  // namespace maxcert
