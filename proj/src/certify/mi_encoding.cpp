#include "maxcert/certify.hpp"

namespace maxcert {

LinExpr& LinExpr::add(const LinExpr& other, double scale) {
  for (const auto& [col, coef] : other.terms) terms.emplace_back(col, scale * coef);
  constant += scale * other.constant;
  return *this;
}

LinExpr& LinExpr::add_term(int col, double coef) {
  terms.emplace_back(col, coef);
  return *this;
}

double LinExpr::value(const Vector& point) const {
  double v = constant;
  for (const auto& [col, coef] : terms) v += coef * point(col);
  return v;
}

int MiEncoding::add_block(const std::string& name, int count, double lo,
                          double hi, bool binary) {
  if (blocks_.count(name)) {
    throw std::invalid_argument("MiEncoding: duplicate block " + name);
  }
  const int first = num_cols();
  for (int k = 0; k < count; ++k) {
    lower_.push_back(lo);
    upper_.push_back(hi);
    if (binary) binaries_.push_back(first + k);
  }
  blocks_[name] = {first, count};
  return first;
}

std::pair<int, int> MiEncoding::block(const std::string& name) const {
  return blocks_.at(name);
}

bool MiEncoding::has_block(const std::string& name) const {
  return blocks_.count(name) > 0;
}

void MiEncoding::add_le(const LinExpr& lhs, double rhs) {
  le_.push_back({lhs, rhs});
}

void MiEncoding::add_eq(const LinExpr& lhs, double rhs) {
  eq_.push_back({lhs, rhs});
}

void MiEncoding::add_one_hot(const std::vector<int>& cols) {
  LinExpr sum;
  for (int c : cols) sum.add_term(c, 1.0);
  add_eq(sum, 1.0);
  groups_.push_back(cols);
}

void MiEncoding::set_bounds(int col, double lo, double hi) {
  lower_.at(col) = lo;
  upper_.at(col) = hi;
}

MilpProblem MiEncoding::to_milp(const LinExpr& objective, Sense sense) const {
  const int n = num_cols();
  auto fill = [n](const std::vector<Row>& rows, Matrix& M, Vector& rhs) {
    M = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), n);
    rhs.resize(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      for (const auto& [col, coef] : rows[i].lhs.terms) M(i, col) += coef;
      rhs(i) = rows[i].rhs - rows[i].lhs.constant;
    }
  };
  MilpProblem p;
  p.sense = sense;
  p.binaries = binaries_;
  LinearProgram& lp = p.base;
  lp.cost = Vector::Zero(n);
  for (const auto& [col, coef] : objective.terms) lp.cost(col) += coef;
  fill(le_, lp.A, lp.b);
  fill(eq_, lp.C, lp.d);
  lp.lower = Eigen::Map<const Vector>(lower_.data(), n);
  lp.upper = Eigen::Map<const Vector>(upper_.data(), n);
  return p;
}

}  // namespace maxcert
