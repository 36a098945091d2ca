#include <algorithm>
#include <chrono>
#include <cmath>

#include "maxcert/certify.hpp"

namespace maxcert {

std::string to_string(NormKind alpha) {
  return alpha == NormKind::One ? "1" : "inf";
}

NormKind parse_norm(const std::string& text) {
  if (text == "1") return NormKind::One;
  if (text == "inf" || text == "infinity" || text == "Inf") return NormKind::Inf;
  throw std::invalid_argument("unknown norm '" + text + "' (use 1 or inf)");
}

std::string to_string(CertificateKind kind) {
  return kind == CertificateKind::MaxError ? "max_error" : "lipschitz";
}

double vector_norm(const Vector& v, NormKind alpha) {
  return alpha == NormKind::One ? v.lpNorm<1>() : v.lpNorm<Eigen::Infinity>();
}

double matrix_norm(const Matrix& M, NormKind alpha) {
  if (alpha == NormKind::Inf) return M.cwiseAbs().rowwise().sum().maxCoeff();
  return M.cwiseAbs().colwise().sum().maxCoeff();
}

namespace {

void check_dims(const PwaFunction& pwa, const MaxoutNetwork& net,
                const Polytope& domain) {
  pwa.validate();
  net.validate();
  if (net.input_dim != pwa.state_dim() || domain.dim() != pwa.state_dim()) {
    throw std::invalid_argument("certify: state dimensions differ");
  }
  if (net.output_dim() != pwa.output_dim()) {
    throw std::invalid_argument("certify: output dimensions differ");
  }
}

// Sampled sanity checks on coverage and on the big-M constants.
void preflight(const PwaFunction& pwa, const MaxoutNetwork& net,
               const Polytope& domain, const CertifySettings& s, bool gain) {
  if (s.preflight_samples <= 0) return;
  for (const Vector& x : sample_uniform(domain, s.preflight_samples, s.seed)) {
    if (pwa.locate(x) < 0) {
      throw ModelError("certify: domain point outside every region of the law");
    }
    Vector y = x;
    Matrix partial = Matrix::Identity(net.input_dim, net.input_dim);
    for (int i = 0; i < net.num_layers(); ++i) {
      const MaxoutLayer& layer = net.layers[i];
      const Vector z = layer.W * y + layer.b;
      Vector next(layer.w);
      std::vector<int> rows(layer.w);
      for (int j = 0; j < layer.w; ++j) {
        const auto seg = z.segment(j * layer.p, layer.p);
        Eigen::Index arg;
        next(j) = seg.maxCoeff(&arg);
        rows[j] = j * layer.p + static_cast<int>(arg);
        if (next(j) - seg.minCoeff() > s.big_m) {
          throw InvalidBigMError("certify: preactivation spread exceeds big-M");
        }
      }
      if (gain) {
        const Matrix Wt = layer.W * partial;
        if (i > 0 && Wt.cwiseAbs().maxCoeff() > s.w_bound) {
          throw InvalidBigMError("certify: gain product exceeds the gain bound");
        }
        partial = Wt(rows, Eigen::all);
      }
      y = next;
    }
  }
}

struct Problem {
  MiEncoding enc;
  std::vector<int> x_cols;
  NetworkEncoding net;
  PwaEncoding law;
};

Problem base_problem(const PwaFunction& pwa, const MaxoutNetwork& model,
                     const Polytope& domain, const CertifySettings& s,
                     double eps) {
  Problem p;
  const int n = pwa.state_dim();
  auto [lo, hi] = bounding_box(domain);
  const int x0 = p.enc.add_block("x", n, -kInf, kInf);
  for (int j = 0; j < n; ++j) {
    p.x_cols.push_back(x0 + j);
    p.enc.set_bounds(x0 + j, lo(j), hi(j));
  }
  for (int k = 0; k < domain.num_rows(); ++k) {
    LinExpr row;
    for (int j = 0; j < n; ++j) {
      if (domain.A(k, j) != 0.0) row.add_term(x0 + j, domain.A(k, j));
    }
    p.enc.add_le(row, domain.b(k));
  }
  p.law = encode_pwa_law(p.enc, p.x_cols, pwa, domain);
  BigMOptions opt;
  opt.big_m = s.big_m;
  opt.eps = eps;
  opt.tighten_over = s.tighten ? &domain : nullptr;
  p.net = encode_network_output(p.enc, p.x_cols, model, opt);
  return p;
}

double bound_or(double b, double fallback) {
  return std::isfinite(b) ? std::min(b, fallback) : fallback;
}

// Adds t ≤ |e| for a scalar expression with |e| ≤ M; returns t's column.
int abs_epigraph(MiEncoding& enc, const std::string& name, const LinExpr& e,
                 double M) {
  const int t = enc.add_block(name, 1, 0.0, M);
  const int z = enc.add_block(name + ".sign", 2, 0.0, 1.0, true);
  // t ≤ ±e + 2M (1 − z±)
  for (int k = 0; k < 2; ++k) {
    const double sign = k == 0 ? 1.0 : -1.0;
    LinExpr row = LinExpr::var(t);
    row.add(e, -sign).add_term(z + k, 2.0 * M);
    enc.add_le(row, 2.0 * M);
  }
  enc.add_one_hot({z, z + 1});
  return t;
}

// t ≤ max over groups of Σ terms in the group, via selectors when needed.
LinExpr max_of_sums(MiEncoding& enc, const std::string& name,
                    const std::vector<std::vector<int>>& groups, double M) {
  if (groups.size() == 1) {
    LinExpr sum;
    for (int c : groups[0]) sum.add_term(c, 1.0);
    return sum;
  }
  const double total = M * static_cast<double>(groups.front().size());
  const int t = enc.add_block(name, 1, 0.0, total);
  const int y = enc.add_block(name + ".select", static_cast<int>(groups.size()),
                              0.0, 1.0, true);
  std::vector<int> sel;
  for (size_t g = 0; g < groups.size(); ++g) {
    LinExpr row = LinExpr::var(t);
    for (int c : groups[g]) row.add_term(c, -1.0);
    row.add_term(y + static_cast<int>(g), total);
    enc.add_le(row, total);
    sel.push_back(y + static_cast<int>(g));
  }
  enc.add_one_hot(sel);
  return LinExpr::var(t);
}

Certificate solve(Problem& p, const LinExpr& objective, CertificateKind kind,
                  NormKind alpha, const CertifySettings& s,
                  std::chrono::steady_clock::time_point start) {
  MilpProblem milp = p.enc.to_milp(objective, Sense::Maximize);
  MilpOptions opt;
  opt.gap_tol = s.gap_tol;
  opt.node_limit = s.node_limit;
  const SolveResult r = solve_milp(milp, opt);

  Certificate c;
  c.kind = kind;
  c.alpha = alpha;
  c.settings = s;
  c.status = r.status;
  c.nodes = r.nodes;
  c.binaries = static_cast<long>(milp.binaries.size());
  c.gap = r.gap;
  if (r.status == SolveStatus::Infeasible) {
    throw ModelError(kind == CertificateKind::Lipschitz
                         ? "lipschitz: every domain point lies within ε of an "
                           "activation boundary"
                         : "max_error: certification MILP is infeasible");
  }
  if (r.status == SolveStatus::Unbounded) {
    throw NumericalError("certify: MILP relaxation unbounded");
  }
  if (r.point.size() > 0) {
    c.value = r.value + objective.constant;
    c.witness = r.point(p.x_cols);
    double best = -1.0;
    for (size_t i = 0; i < p.law.rho.size(); ++i) {
      if (r.point(p.law.rho[i]) > best) {
        best = r.point(p.law.rho[i]);
        c.witness_region = static_cast<int>(i);
      }
    }
  } else {
    c.value = kInf;
  }
  c.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

}  // namespace

Certificate max_error(const PwaFunction& pwa, const MaxoutNetwork& net,
                      const Polytope& domain, NormKind alpha,
                      const CertifySettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  check_dims(pwa, net, domain);
  preflight(pwa, net, domain, settings, false);
  Problem p = base_problem(pwa, net, domain, settings, 0.0);
  const int m = pwa.output_dim();

  std::vector<int> t_cols;
  double M_max = 0.0;
  for (int k = 0; k < m; ++k) {
    LinExpr e = p.law.value[k];
    e.add(p.net.output[k], -1.0);
    const double bound = std::max(std::abs(p.law.value_hi(k) - p.net.output_lo(k)),
                                  std::abs(p.net.output_hi(k) - p.law.value_lo(k)));
    const double M = bound_or(bound, settings.big_m);
    M_max = std::max(M_max, M);
    t_cols.push_back(abs_epigraph(p.enc, "err" + std::to_string(k), e, M));
  }
  LinExpr objective;
  if (alpha == NormKind::One) {
    for (int t : t_cols) objective.add_term(t, 1.0);
  } else {
    std::vector<std::vector<int>> groups;
    for (int t : t_cols) groups.push_back({t});
    objective = max_of_sums(p.enc, "err.max", groups, M_max);
  }
  return solve(p, objective, CertificateKind::MaxError, alpha, settings, start);
}

Certificate lipschitz(const PwaFunction& pwa, const MaxoutNetwork& net,
                      const Polytope& domain, NormKind alpha,
                      const CertifySettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  check_dims(pwa, net, domain);
  if (!(settings.eps > 0.0)) {
    throw std::invalid_argument("lipschitz: ε must be positive");
  }
  preflight(pwa, net, domain, settings, true);
  Problem p = base_problem(pwa, net, domain, settings, settings.eps);
  const auto K_nn = encode_network_gain(p.enc, net, p.net, settings.w_bound);
  const int m = pwa.output_dim();
  const int n = pwa.state_dim();

  // Entry bounds: |K_MPC| from the pieces, |K_NN| from the layer-1 weights.
  double mpc_bound = 0.0;
  for (const Matrix& K : pwa.gains) mpc_bound = std::max(mpc_bound, K.cwiseAbs().maxCoeff());
  double nn_bound = settings.w_bound * net.W_out.cwiseAbs().maxCoeff() *
                    static_cast<double>(net.W_out.cols());
  if (net.num_layers() == 1) {
    const MaxoutLayer& layer = net.layers[0];
    nn_bound = 0.0;
    for (int k = 0; k < m; ++k) {
      double row = 0.0;
      for (int s = 0; s < layer.w; ++s) {
        row += std::abs(net.W_out(k, s)) *
               layer.W.middleRows(s * layer.p, layer.p).cwiseAbs().maxCoeff();
      }
      nn_bound = std::max(nn_bound, row);
    }
  } else if (net.num_layers() == 0) {
    nn_bound = net.W_out.cwiseAbs().maxCoeff();
  }
  const double M = std::min(mpc_bound + nn_bound, settings.big_m);

  std::vector<std::vector<int>> a(m, std::vector<int>(n));
  for (int k = 0; k < m; ++k) {
    for (int r = 0; r < n; ++r) {
      LinExpr d = p.law.gain[k][r];
      d.add(K_nn[k][r], -1.0);
      a[k][r] = abs_epigraph(
          p.enc, "dgain" + std::to_string(k) + "_" + std::to_string(r), d, M);
    }
  }
  std::vector<std::vector<int>> groups;
  if (alpha == NormKind::Inf) {
    groups = a;  // rows
  } else {
    for (int r = 0; r < n; ++r) {
      std::vector<int> col;
      for (int k = 0; k < m; ++k) col.push_back(a[k][r]);
      groups.push_back(col);
    }
  }
  const LinExpr objective = max_of_sums(p.enc, "dgain.max", groups, M);
  return solve(p, objective, CertificateKind::Lipschitz, alpha, settings, start);
}

double replay(const Certificate& cert, const PwaFunction& pwa,
              const MaxoutNetwork& net) {
  if (cert.witness.size() != pwa.state_dim()) {
    throw std::invalid_argument("replay: certificate has no witness");
  }
  const int i = cert.witness_region >= 0 ? cert.witness_region : pwa.locate(cert.witness);
  if (i < 0) throw InfeasibleStateError("replay: witness outside the law");
  if (cert.kind == CertificateKind::MaxError) {
    const Vector u = pwa.gains[i] * cert.witness + pwa.offsets[i];
    return vector_norm(u - eval(net, cert.witness), cert.alpha);
  }
  const ActivationPattern pat = activation_pattern(net, cert.witness, 0.0);
  const Matrix K = pattern_affine(net, pat).first;
  return matrix_norm(pwa.gains[i] - K, cert.alpha);
}

}  // namespace maxcert
