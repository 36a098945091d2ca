#include <algorithm>
#include <cmath>
#include <memory>

#include "maxcert/optim.hpp"

namespace maxcert {
namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kRefactorEvery = 64;
constexpr int kStallBeforeBland = 40;

enum class Col : std::int8_t { Basic, Lower, Upper, Zero };

// Row-activity form: [A_ineq; C] x − r = 0 with bounds on x and on r.
// Columns j < n are structural, j ≥ n are the row activities r.
class BoundedSimplex {
 public:
  explicit BoundedSimplex(const LinearProgram& lp)
      : n_(lp.num_vars()), m_(lp.num_ineq() + lp.num_eq()) {
    rows_.resize(m_, n_);
    if (lp.num_ineq() > 0) rows_.topRows(lp.num_ineq()) = lp.A;
    if (lp.num_eq() > 0) rows_.bottomRows(lp.num_eq()) = lp.C;
    const int total = n_ + m_;
    cost_ = Vector::Zero(total);
    cost_.head(n_) = lp.cost;
    lo_.resize(total);
    hi_.resize(total);
    lo_.head(n_) = lp.lower;
    hi_.head(n_) = lp.upper;
    for (int i = 0; i < lp.num_ineq(); ++i) {
      lo_(n_ + i) = -kInf;
      hi_(n_ + i) = lp.b(i);
    }
    for (int i = 0; i < lp.num_eq(); ++i) {
      lo_(n_ + lp.num_ineq() + i) = lp.d(i);
      hi_(n_ + lp.num_ineq() + i) = lp.d(i);
    }
    num_ineq_ = lp.num_ineq();
  }

  SolveResult run(const Basis* warm) {
    for (int j = 0; j < n_ + m_; ++j) {
      if (lo_(j) > hi_(j) + kPrimalTol) {
        SolveResult r;
        r.status = SolveStatus::Infeasible;
        return r;
      }
    }
    if (!(warm && load_basis(*warm))) cold_start();

    const long max_iter = 20000 + 50L * (n_ + m_);
    long iter = 0;
    int stall = 0;
    bool bland = false;
    int since_refactor = 0;
    Vector cb(m_);
    Vector y(m_);
    Vector d(n_ + m_);
    Vector alpha(m_);

    for (;; ++iter) {
      if (iter > max_iter) {
        throw NumericalError("simplex: iteration limit exceeded");
      }
      if (since_refactor >= kRefactorEvery) {
        if (!refactor()) {
          throw NumericalError("simplex: basis factorization failed");
        }
        since_refactor = 0;
      }

      bool phase1 = false;
      for (int i = 0; i < m_; ++i) {
        const int j = basic_[i];
        if (x_(j) < lo_(j) - kPrimalTol) {
          cb(i) = -1.0;
          phase1 = true;
        } else if (x_(j) > hi_(j) + kPrimalTol) {
          cb(i) = 1.0;
          phase1 = true;
        } else {
          cb(i) = 0.0;
        }
      }
      if (!phase1) {
        for (int i = 0; i < m_; ++i) cb(i) = cost_(basic_[i]);
      }
      y.noalias() = binv_.transpose() * cb;

      // Pricing.
      int enter = -1;
      int dir = 0;
      double best = 0.0;
      if (n_ > 0) d.head(n_).noalias() = -(rows_.transpose() * y);
      d.tail(m_) = y;
      if (!phase1) d.head(n_) += cost_.head(n_);
      for (int j = 0; j < n_ + m_; ++j) {
        const Col s = state_[j];
        if (s == Col::Basic) continue;
        if (lo_(j) == hi_(j)) continue;
        const double dj = d(j);
        int cand = 0;
        if ((s == Col::Lower || s == Col::Zero) && dj < -kDualTol) cand = 1;
        if ((s == Col::Upper || s == Col::Zero) && dj > kDualTol) cand = -1;
        if (cand == 0) continue;
        if (bland) {
          enter = j;
          dir = cand;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          enter = j;
          dir = cand;
        }
      }

      if (enter < 0 && stale()) {
        if (!refactor()) {
          throw NumericalError("simplex: basis factorization failed");
        }
        since_refactor = 0;
        continue;
      }
      if (enter < 0) {
        if (phase1) {
          SolveResult r;
          r.status = SolveStatus::Infeasible;
          r.iterations = iter;
          return r;
        }
        return finish(y, iter);
      }

      column_image(enter, alpha);

      // Harris two-pass ratio test on the bounds that apply to each basic
      // variable (phase 1 lets infeasible basics travel to their violated
      // bound only).
      auto eff_bounds = [&](int j, double& elo, double& ehi) {
        if (x_(j) < lo_(j) - kPrimalTol) {
          elo = -kInf;
          ehi = lo_(j);
        } else if (x_(j) > hi_(j) + kPrimalTol) {
          elo = hi_(j);
          ehi = kInf;
        } else {
          elo = lo_(j);
          ehi = hi_(j);
        }
      };
      double relaxed = kInf;
      for (int i = 0; i < m_; ++i) {
        const double rate = -dir * alpha(i);
        if (std::abs(alpha(i)) <= kPivotTol) continue;
        const int j = basic_[i];
        double elo, ehi;
        eff_bounds(j, elo, ehi);
        double lim = kInf;
        if (rate > 0 && ehi < kInf) lim = (ehi + kPrimalTol - x_(j)) / rate;
        if (rate < 0 && elo > -kInf) lim = (elo - kPrimalTol - x_(j)) / rate;
        relaxed = std::min(relaxed, std::max(lim, 0.0));
      }
      int leave = -1;
      double step = kInf;
      double leave_bound = 0.0;
      bool leave_upper = false;
      double best_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double rate = -dir * alpha(i);
        if (std::abs(alpha(i)) <= kPivotTol) continue;
        const int j = basic_[i];
        double elo, ehi;
        eff_bounds(j, elo, ehi);
        double lim = kInf;
        double bnd = 0.0;
        bool up = false;
        if (rate > 0 && ehi < kInf) {
          lim = (ehi - x_(j)) / rate;
          bnd = ehi;
          up = true;
        } else if (rate < 0 && elo > -kInf) {
          lim = (elo - x_(j)) / rate;
          bnd = elo;
        } else {
          continue;
        }
        lim = std::max(lim, 0.0);
        if (bland) {
          if (lim < step - 1e-12 ||
              (lim <= step + 1e-12 && leave >= 0 && j < basic_[leave])) {
            step = lim;
            leave = i;
            leave_bound = bnd;
            leave_upper = up;
          }
        } else if (lim <= relaxed && std::abs(alpha(i)) > best_pivot) {
          best_pivot = std::abs(alpha(i));
          step = lim;
          leave = i;
          leave_bound = bnd;
          leave_upper = up;
        }
      }

      const double flip = hi_(enter) - lo_(enter);
      if (flip < kInf && flip <= step) {
        x_(enter) += dir * flip;
        for (int i = 0; i < m_; ++i) x_(basic_[i]) -= dir * flip * alpha(i);
        state_[enter] = dir > 0 ? Col::Upper : Col::Lower;
        x_(enter) = dir > 0 ? hi_(enter) : lo_(enter);
        fresh_ = false;
        stall = 0;
        bland = false;
        continue;
      }
      if (leave < 0 && stale()) {
        if (!refactor()) {
          throw NumericalError("simplex: basis factorization failed");
        }
        since_refactor = 0;
        continue;
      }
      if (leave < 0) {
        if (phase1) {
          throw NumericalError("simplex: unbounded phase-1 ray");
        }
        SolveResult r;
        r.status = SolveStatus::Unbounded;
        r.iterations = iter;
        return r;
      }

      if (step <= 1e-12) {
        if (++stall > kStallBeforeBland) bland = true;
      } else {
        stall = 0;
        bland = false;
      }

      x_(enter) += dir * step;
      for (int i = 0; i < m_; ++i) x_(basic_[i]) -= dir * step * alpha(i);
      const int out = basic_[leave];
      x_(out) = leave_bound;
      if (lo_(out) == -kInf && hi_(out) == kInf) {
        state_[out] = Col::Zero;
      } else if (leave_upper) {
        state_[out] = (leave_bound == hi_(out)) ? Col::Upper : Col::Lower;
      } else {
        state_[out] = (leave_bound == lo_(out)) ? Col::Lower : Col::Upper;
      }
      basic_[leave] = enter;
      state_[enter] = Col::Basic;

      const double piv = alpha(leave);
      Eigen::RowVectorXd prow = binv_.row(leave) / piv;
      binv_.noalias() -= alpha * prow;
      binv_.row(leave) = prow;
      ++since_refactor;
      fresh_ = false;
    }
  }

 private:
  void column_image(int j, Vector& out) const {
    if (j < n_) {
      out.noalias() = binv_ * rows_.col(j);
    } else {
      out = -binv_.col(j - n_);
    }
  }

  double nonbasic_value(int j) const {
    switch (state_[j]) {
      case Col::Lower:
        return lo_(j);
      case Col::Upper:
        return hi_(j);
      default:
        return 0.0;
    }
  }

  Col default_state(int j) const {
    if (lo_(j) > -kInf) return Col::Lower;
    if (hi_(j) < kInf) return Col::Upper;
    return Col::Zero;
  }

  void cold_start() {
    state_.assign(n_ + m_, Col::Lower);
    basic_.resize(m_);
    for (int j = 0; j < n_; ++j) state_[j] = default_state(j);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      state_[n_ + i] = Col::Basic;
    }
    binv_ = -Matrix::Identity(m_, m_);
    compute_basics();
    fresh_ = true;
  }

  // Terminal verdicts are only trusted on a factorization whose basic values
  // still satisfy the rows.
  bool stale() {
    if (fresh_) return false;
    return drift() > kPrimalTol;
  }

  // Largest residual of [A; C] x − r = 0 at the current values.
  double drift() const {
    if (m_ == 0) return 0.0;
    return (rows_ * x_.head(n_) - x_.tail(m_)).cwiseAbs().maxCoeff();
  }

  bool load_basis(const Basis& warm) {
    if (static_cast<int>(warm.basic.size()) != m_ ||
        static_cast<int>(warm.at_upper.size()) != n_ + m_) {
      return false;
    }
    state_.assign(n_ + m_, Col::Lower);
    for (int j = 0; j < n_ + m_; ++j) {
      Col s = default_state(j);
      if (warm.at_upper[j] && hi_(j) < kInf) s = Col::Upper;
      if (!warm.at_upper[j] && lo_(j) > -kInf) s = Col::Lower;
      state_[j] = s;
    }
    basic_ = warm.basic;
    for (int j : basic_) {
      if (j < 0 || j >= n_ + m_ || state_[j] == Col::Basic) return false;
      state_[j] = Col::Basic;
    }
    if (warm.inverse && warm.inverse->rows() == m_ && warm.inverse->cols() == m_) {
      binv_ = *warm.inverse;
      compute_basics();
      fresh_ = false;
      return true;
    }
    return refactor();
  }

  // Rebuilds the explicit inverse and the basic values.
  bool refactor() {
    if (m_ == 0) {
      binv_.resize(0, 0);
      x_ = Vector::Zero(n_);
      for (int j = 0; j < n_; ++j) x_(j) = nonbasic_value(j);
      return true;
    }
    Matrix basis(m_, m_);
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      if (j < n_) {
        basis.col(i) = rows_.col(j);
      } else {
        basis.col(i).setZero();
        basis(j - n_, i) = -1.0;
      }
    }
    Eigen::PartialPivLU<Matrix> lu(basis);
    if (!(lu.rcond() > 1e-13)) return false;
    binv_ = lu.inverse();
    if (!binv_.allFinite()) return false;
    compute_basics();
    fresh_ = true;
    return true;
  }

  void compute_basics() {
    x_.resize(n_ + m_);
    Vector rhs = Vector::Zero(m_);
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == Col::Basic) continue;
      const double v = nonbasic_value(j);
      x_(j) = v;
      if (v == 0.0) continue;
      if (j < n_) {
        rhs.noalias() -= rows_.col(j) * v;
      } else {
        rhs(j - n_) += v;
      }
    }
    Vector xb = binv_ * rhs;
    for (int i = 0; i < m_; ++i) x_(basic_[i]) = xb(i);
  }

  SolveResult finish(const Vector& y, long iter) {
    SolveResult r;
    r.status = SolveStatus::Optimal;
    r.iterations = iter;
    r.point = x_.head(n_);
    r.value = cost_.head(n_).dot(r.point);
    r.dual_ineq = -y.head(num_ineq_);
    r.dual_eq = -y.tail(m_ - num_ineq_);
    r.reduced_cost = cost_.head(n_);
    if (n_ > 0) r.reduced_cost.noalias() -= rows_.transpose() * y;
    for (int i = 0; i < num_ineq_; ++i) {
      const int j = n_ + i;
      if (state_[j] != Col::Basic ||
          x_(j) >= hi_(j) - kPrimalTol * (1.0 + std::abs(hi_(j)))) {
        r.active.push_back(i);
      }
    }
    Basis b;
    b.basic = basic_;
    b.at_upper.resize(n_ + m_);
    for (int j = 0; j < n_ + m_; ++j) {
      b.at_upper[j] = state_[j] == Col::Upper ? 1 : 0;
    }
    b.inverse = std::make_shared<const Matrix>(binv_);
    r.basis = std::move(b);
    return r;
  }

  int n_;
  int m_;
  int num_ineq_ = 0;
  Matrix rows_;
  Vector cost_;
  Vector lo_;
  Vector hi_;
  std::vector<int> basic_;
  std::vector<Col> state_;
  Vector x_;
  Matrix binv_;
  bool fresh_ = false;
};

// Largest absolute bound or row violation of a point.
double violation(const LinearProgram& lp, const Vector& x) {
  double worst = 0.0;
  for (int j = 0; j < lp.num_vars(); ++j) {
    worst = std::max({worst, lp.lower(j) - x(j), x(j) - lp.upper(j)});
  }
  if (lp.num_ineq() > 0) worst = std::max(worst, (lp.A * x - lp.b).maxCoeff());
  if (lp.num_eq() > 0) worst = std::max(worst, (lp.C * x - lp.d).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

SolveResult solve_lp(const LinearProgram& lp, const Basis* warm) {
  lp.validate();
  if (warm != nullptr) {
    try {
      BoundedSimplex simplex(lp);
      SolveResult r = simplex.run(warm);
      // Accumulated eta updates can hide infeasibility; distrust such answers.
      if (r.status != SolveStatus::Optimal || violation(lp, r.point) <= 1e-7) {
        return r;
      }
    } catch (const NumericalError&) {
      // Retry from the slack basis below.
    }
  }
  BoundedSimplex simplex(lp);
  return simplex.run(nullptr);
}

}  // namespace maxcert
