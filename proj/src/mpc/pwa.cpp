#include <algorithm>
#include <cmath>

#include "maxcert/mpc.hpp"

namespace maxcert {

int PwaFunction::locate(const Eigen::Ref<const Vector>& x, double tol) const {
  for (int i = 0; i < num_regions(); ++i) {
    if (contains(regions[i], x, tol)) return i;
  }
  return -1;
}

Vector PwaFunction::eval(const Eigen::Ref<const Vector>& x) const {
  const int i = locate(x);
  if (i < 0) throw InfeasibleStateError("PwaFunction::eval: x in no region");
  return gains[i] * x + offsets[i];
}

Matrix PwaFunction::gain(const Eigen::Ref<const Vector>& x) const {
  const int i = locate(x);
  if (i < 0) throw InfeasibleStateError("PwaFunction::gain: x in no region");
  return gains[i];
}

void PwaFunction::validate() const {
  if (regions.empty()) throw std::invalid_argument("PwaFunction: no regions");
  if (gains.size() != regions.size() || offsets.size() != regions.size()) {
    throw std::invalid_argument("PwaFunction: region/law count mismatch");
  }
  domain.validate();
  const int n = state_dim();
  const int m = output_dim();
  if (m < 1) throw std::invalid_argument("PwaFunction: empty output");
  for (int i = 0; i < num_regions(); ++i) {
    regions[i].validate();
    if (regions[i].dim() != n || gains[i].rows() != m || gains[i].cols() != n ||
        offsets[i].size() != m) {
      throw std::invalid_argument("PwaFunction: inconsistent piece dimensions");
    }
    if (!gains[i].allFinite() || !offsets[i].allFinite()) {
      throw std::invalid_argument("PwaFunction: non-finite law");
    }
  }
}

const Polytope& feasible_set(const PwaFunction& pwa) { return pwa.domain; }

double max_discontinuity(const PwaFunction& pwa) {
  double worst = 0.0;
  for (int i = 0; i < pwa.num_regions(); ++i) {
    for (int j = i + 1; j < pwa.num_regions(); ++j) {
      const Polytope both = pwa.regions[i].intersect(pwa.regions[j]);
      const Matrix dK = pwa.gains[i] - pwa.gains[j];
      const Vector db = pwa.offsets[i] - pwa.offsets[j];
      for (int r = 0; r < dK.rows(); ++r) {
        const Vector dir = dK.row(r).transpose();
        std::optional<double> hi = support(both, dir);
        if (!hi) break;  // regions do not touch
        std::optional<double> lo = support(both, -dir);
        worst = std::max({worst, *hi + db(r), *lo - db(r)});
      }
    }
  }
  return worst;
}

}  // namespace maxcert
