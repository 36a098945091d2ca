#include "maxcert/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace maxcert {
namespace {

std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(indent * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? std::string(indent * depth, ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  // Short numeric arrays stay on one line.
  auto flat = [](const Json& a) {
    for (const Json& e : a) {
      if (!e.is_number() && !e.is_null()) return false;
    }
    return true;
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
        emit(os, it.value(), indent, depth + 1);
      }
      os << nl << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      if (flat(j)) {
        os << '[';
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) os << (indent > 0 ? ", " : ",");
          emit(os, j[i], indent, depth + 1);
        }
        os << ']';
        return;
      }
      os << '[' << nl;
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) os << ',' << nl;
        os << pad;
        emit(os, j[i], indent, depth + 1);
      }
      os << nl << close << ']';
      return;
    }
    case Json::value_t::number_float:
      os << number(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T field_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return field<T>(j, key);
}

double to_double(const Json& e) {
  if (e.is_null()) return kInf;
  if (!e.is_number()) throw ConfigError("expected a number");
  return e.get<double>();
}

// Row-major flat array or array of rows.
Matrix shaped(const Json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (j.is_array() && !j.empty() && j.front().is_array()) {
    Matrix M = matrix_from_json(j);
    if (M.rows() != rows || M.cols() != cols) {
      throw ConfigError(std::string(what) + ": wrong shape");
    }
    return M;
  }
  const Vector flat = vector_from_json(j);
  if (flat.size() != rows * cols) throw ConfigError(std::string(what) + ": wrong size");
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = flat(r * cols + c);
  }
  return M;
}

std::string csv_number(double v) { return number(v) == "null" ? "inf" : number(v); }

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::ostringstream os;
  emit(os, j, indent, 0);
  return os.str();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, dump_json(j) + "\n");
}

Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array()) throw ConfigError("matrix: expected an array of rows");
  if (j.empty()) return Matrix(0, 0);
  const size_t cols = j.front().is_array() ? j.front().size() : 0;
  Matrix M(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigError("matrix: ragged or non-array row");
    }
    for (size_t c = 0; c < cols; ++c) M(r, c) = to_double(j[r][c]);
  }
  return M;
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from_json(const Json& j) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) throw ConfigError("vector: expected an array");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(i) = to_double(j[i]);
  return v;
}

Json polytope_to_json(const Polytope& P) {
  return Json{{"A", matrix_to_json(P.A)}, {"b", vector_to_json(P.b)}};
}

Polytope polytope_from_json(const Json& j) {
  if (j.is_object() && j.contains("lower")) {
    const Vector lo = vector_from_json(j.at("lower"));
    const Vector hi = vector_from_json(field<Json>(j, "upper"));
    if (lo.size() != hi.size() || (lo.array() > hi.array()).any()) {
      throw ConfigError("box: bounds mismatch");
    }
    return Polytope::box(lo, hi);
  }
  Polytope P;
  P.A = matrix_from_json(field<Json>(j, "A"));
  P.b = vector_from_json(field<Json>(j, "b"));
  if (P.A.rows() != P.b.size()) throw ConfigError("polytope: rows of A and b differ");
  return P;
}

Json network_to_json(const MaxoutNetwork& net) {
  Json layers = Json::array();
  for (const MaxoutLayer& layer : net.layers) {
    layers.push_back(Json{{"p", layer.p},
                          {"w", layer.w},
                          {"W", matrix_to_json(layer.W)},
                          {"b", vector_to_json(layer.b)}});
  }
  return Json{{"input_dim", net.input_dim},
              {"layers", layers},
              {"W_out", matrix_to_json(net.W_out)},
              {"b_out", vector_to_json(net.b_out)}};
}

MaxoutNetwork network_from_json(const Json& j) {
  MaxoutNetwork net;
  net.input_dim = field<int>(j, "input_dim");
  if (net.input_dim < 1) throw ConfigError("network: input_dim < 1");
  int prev = net.input_dim;
  for (const Json& l : field<Json>(j, "layers")) {
    MaxoutLayer layer;
    layer.p = field<int>(l, "p");
    layer.w = field<int>(l, "w");
    if (layer.p < 1 || layer.w < 1) throw ConfigError("network: p and w must be ≥ 1");
    layer.W = shaped(field<Json>(l, "W"), layer.p * layer.w, prev, "layer W");
    layer.b = vector_from_json(field<Json>(l, "b"));
    prev = layer.w;
    net.layers.push_back(std::move(layer));
  }
  net.b_out = vector_from_json(field<Json>(j, "b_out"));
  net.W_out = shaped(field<Json>(j, "W_out"), net.b_out.size(), prev, "W_out");
  try {
    net.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return net;
}

Json pwa_to_json(const PwaFunction& pwa) {
  Json regions = Json::array();
  for (int i = 0; i < pwa.num_regions(); ++i) {
    regions.push_back(Json{{"A", matrix_to_json(pwa.regions[i].A)},
                           {"b", vector_to_json(pwa.regions[i].b)},
                           {"K", matrix_to_json(pwa.gains[i])},
                           {"offset", vector_to_json(pwa.offsets[i])}});
  }
  return Json{{"domain", polytope_to_json(pwa.domain)}, {"regions", regions}};
}

PwaFunction pwa_from_json(const Json& j) {
  PwaFunction pwa;
  pwa.domain = polytope_from_json(field<Json>(j, "domain"));
  for (const Json& r : field<Json>(j, "regions")) {
    pwa.regions.push_back(polytope_from_json(r));
    pwa.gains.push_back(matrix_from_json(field<Json>(r, "K")));
    pwa.offsets.push_back(vector_from_json(field<Json>(r, "offset")));
  }
  try {
    pwa.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return pwa;
}

namespace {

Json settings_to_json(const CertifySettings& s) {
  return Json{{"big_m", s.big_m},
              {"w_bound", s.w_bound},
              {"epsilon", s.eps},
              {"gap_tol", s.gap_tol},
              {"node_limit", s.node_limit},
              {"tighten", s.tighten},
              {"preflight_samples", s.preflight_samples},
              {"seed", s.seed}};
}

CertifySettings settings_from_json(const Json& j, CertifySettings s = {}) {
  s.big_m = field_or(j, "big_m", s.big_m);
  s.w_bound = field_or(j, "w_bound", s.w_bound);
  s.eps = field_or(j, "epsilon", s.eps);
  s.gap_tol = field_or(j, "gap_tol", s.gap_tol);
  s.node_limit = field_or(j, "node_limit", s.node_limit);
  s.tighten = field_or(j, "tighten", s.tighten);
  s.preflight_samples = field_or(j, "preflight_samples", s.preflight_samples);
  s.seed = field_or(j, "seed", s.seed);
  return s;
}

SolveStatus parse_status(const std::string& s) {
  for (SolveStatus st : {SolveStatus::Optimal, SolveStatus::Infeasible,
                         SolveStatus::Unbounded, SolveStatus::GapLimit}) {
    if (to_string(st) == s) return st;
  }
  throw ConfigError("unknown status '" + s + "'");
}

}  // namespace

Json certificate_to_json(const Certificate& c) {
  return Json{{"kind", to_string(c.kind)},
              {"alpha", to_string(c.alpha)},
              {"value", c.value},
              {"witness", vector_to_json(c.witness)},
              {"witness_region", c.witness_region},
              {"gap", c.gap},
              {"status", to_string(c.status)},
              {"nodes", c.nodes},
              {"binaries", c.binaries},
              {"settings", settings_to_json(c.settings)},
              {"wall_time", c.wall_time}};
}

Certificate certificate_from_json(const Json& j) {
  Certificate c;
  const std::string kind = field<std::string>(j, "kind");
  if (kind == to_string(CertificateKind::MaxError)) {
    c.kind = CertificateKind::MaxError;
  } else if (kind == to_string(CertificateKind::Lipschitz)) {
    c.kind = CertificateKind::Lipschitz;
  } else {
    throw ConfigError("unknown certificate kind '" + kind + "'");
  }
  try {
    c.alpha = parse_norm(field<std::string>(j, "alpha"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.value = to_double(field<Json>(j, "value"));
  c.witness = vector_from_json(field<Json>(j, "witness"));
  c.witness_region = field_or(j, "witness_region", -1);
  c.gap = to_double(field<Json>(j, "gap"));
  c.status = parse_status(field_or<std::string>(j, "status", "optimal"));
  c.nodes = field_or(j, "nodes", 0L);
  c.binaries = field_or(j, "binaries", 0L);
  c.settings = settings_from_json(field<Json>(j, "settings"));
  c.wall_time = field_or(j, "wall_time", 0.0);
  return c;
}

Json dataset_to_json(const Dataset& d) {
  return Json{{"seed", d.seed},
              {"inputs", matrix_to_json(d.inputs)},
              {"targets", matrix_to_json(d.targets)}};
}

Dataset dataset_from_json(const Json& j) {
  Dataset d;
  d.seed = field_or<std::uint64_t>(j, "seed", 0);
  d.inputs = matrix_from_json(field<Json>(j, "inputs"));
  d.targets = matrix_from_json(field<Json>(j, "targets"));
  if (d.inputs.rows() != d.targets.rows()) {
    throw ConfigError("dataset: inputs and targets differ in length");
  }
  return d;
}

Json train_report_to_json(const TrainReport& r) {
  return Json{{"network", network_to_json(r.network)},
              {"mse_trace", r.mse_trace},
              {"epochs", r.options.epochs},
              {"batch", r.options.batch},
              {"step", r.options.step},
              {"seed", r.options.seed},
              {"initial_mse", r.initial_mse},
              {"final_mse", r.final_mse},
              {"halvings", r.halvings}};
}

std::string trace_csv(const std::vector<double>& trace) {
  std::string s = "epoch,mse\n";
  for (size_t k = 0; k < trace.size(); ++k) {
    s += std::to_string(k + 1) + "," + csv_number(trace[k]) + "\n";
  }
  return s;
}

std::string report_csv(const std::vector<ReportRow>& rows, bool with_status) {
  std::string s = "No.,w1,p1,num_params,mse_root,max_err_inf,lip_inf";
  s += with_status ? ",status\n" : "\n";
  for (const ReportRow& r : rows) {
    s += std::to_string(r.no) + "," + std::to_string(r.w1) + "," + std::to_string(r.p1) +
         "," + std::to_string(r.num_params) + "," + csv_number(r.mse_root) + "," +
         csv_number(r.max_err) + "," + csv_number(r.lip);
    s += with_status ? "," + r.status + "\n" : "\n";
  }
  return s;
}

void ExperimentConfig::validate() const {
  const Eigen::Index n = A.rows();
  if (n < 1 || A.cols() != n) throw ConfigError("system: A must be square");
  if (B.rows() != n || B.cols() < 1) throw ConfigError("system: B has the wrong shape");
  if (Q.rows() != n || Q.cols() != n) throw ConfigError("system: Q has the wrong shape");
  if (R.rows() != B.cols() || R.cols() != B.cols()) {
    throw ConfigError("system: R has the wrong shape");
  }
  if (N < 1) throw ConfigError("system: N must be ≥ 1");
  if (X.dim() != n || U.dim() != B.cols()) throw ConfigError("system: X or U has the wrong dimension");
  if (terminal_set_mode == "given") {
    if (T.dim() != n) throw ConfigError("system: terminal set has the wrong dimension");
  } else if (terminal_set_mode != "moas") {
    throw ConfigError("system: terminal_set.mode must be given or moas");
  }
  if (terminal_cost_mode == "given") {
    if (P.rows() != n || P.cols() != n) throw ConfigError("system: P has the wrong shape");
  } else if (terminal_cost_mode != "dare") {
    throw ConfigError("system: terminal_cost.mode must be given or dare");
  }
  if (exact_method != "dc" && exact_method != "hinge") {
    throw ConfigError("networks: exact_method must be dc or hinge");
  }
  for (const Topology& t : topologies) {
    if (t.widths.empty() || t.widths.size() != t.channels.size()) {
      throw ConfigError("networks: widths and channels must be non-empty and equal length");
    }
    for (size_t i = 0; i < t.widths.size(); ++i) {
      if (t.widths[i] < 1 || t.channels[i] < 1) {
        throw ConfigError("networks: widths and channels must be ≥ 1");
      }
    }
  }
  for (const std::string& d : {error_domain, lipschitz_domain}) {
    if (d != "feasible" && d != "terminal") {
      throw ConfigError("certification: domains must be feasible or terminal");
    }
  }
  if (!(certify.eps > 0.0) || !(certify.big_m > 0.0) || !(certify.w_bound > 0.0) ||
      certify.node_limit < 1) {
    throw ConfigError("certification: epsilon, big_m, w_bound, node_limit must be positive");
  }
  if (samples < 1 || training.epochs < 0 || training.batch < 1 || !(training.step > 0.0)) {
    throw ConfigError("training: need samples ≥ 1, epochs ≥ 0, batch ≥ 1, step > 0");
  }
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: expected an object");
  ExperimentConfig cfg;
  cfg.name = field_or<std::string>(j, "name", "");
  const Json sys = field<Json>(j, "system");
  cfg.A = matrix_from_json(field<Json>(sys, "A"));
  cfg.B = matrix_from_json(field<Json>(sys, "B"));
  cfg.Q = matrix_from_json(field<Json>(sys, "Q"));
  cfg.R = matrix_from_json(field<Json>(sys, "R"));
  cfg.N = field<int>(sys, "N");
  cfg.X = polytope_from_json(field<Json>(sys, "X"));
  cfg.U = polytope_from_json(field<Json>(sys, "U"));
  const Json ts = field<Json>(sys, "terminal_set");
  cfg.terminal_set_mode = field<std::string>(ts, "mode");
  if (cfg.terminal_set_mode == "given") cfg.T = polytope_from_json(field<Json>(ts, "set"));
  const Json tc = field<Json>(sys, "terminal_cost");
  cfg.terminal_cost_mode = field<std::string>(tc, "mode");
  if (cfg.terminal_cost_mode == "given") cfg.P = matrix_from_json(field<Json>(tc, "P"));

  const Json nets = field_or(j, "networks", Json::object());
  cfg.exact = field_or(nets, "exact", false);
  cfg.exact_method = field_or<std::string>(nets, "exact_method", "dc");
  for (const Json& t : field_or(nets, "topologies", Json::array())) {
    cfg.topologies.push_back(
        {field<std::vector<int>>(t, "widths"), field<std::vector<int>>(t, "channels")});
  }

  const Json cert = field_or(j, "certification", Json::object());
  try {
    cfg.alpha = parse_norm(field_or<std::string>(cert, "alpha", "inf"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.certify = settings_from_json(cert);
  cfg.error_domain = field_or<std::string>(cert, "error_domain", "feasible");
  cfg.lipschitz_domain = field_or<std::string>(cert, "lipschitz_domain", "terminal");

  const Json tr = field_or(j, "training", Json::object());
  cfg.samples = field_or(tr, "samples", cfg.samples);
  cfg.training.epochs = field_or(tr, "epochs", cfg.training.epochs);
  cfg.training.batch = field_or(tr, "batch", cfg.training.batch);
  cfg.training.step = field_or(tr, "step", cfg.training.step);
  cfg.data_seed = field_or(tr, "data_seed", cfg.data_seed);

  cfg.seed = field_or(j, "seed", cfg.seed);
  cfg.out = field_or<std::string>(j, "out", cfg.out);
  cfg.validate();
  return cfg;
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json sys{{"A", matrix_to_json(cfg.A)},
           {"B", matrix_to_json(cfg.B)},
           {"Q", matrix_to_json(cfg.Q)},
           {"R", matrix_to_json(cfg.R)},
           {"N", cfg.N},
           {"X", polytope_to_json(cfg.X)},
           {"U", polytope_to_json(cfg.U)}};
  sys["terminal_set"] = Json{{"mode", cfg.terminal_set_mode}};
  if (cfg.terminal_set_mode == "given") sys["terminal_set"]["set"] = polytope_to_json(cfg.T);
  sys["terminal_cost"] = Json{{"mode", cfg.terminal_cost_mode}};
  if (cfg.terminal_cost_mode == "given") sys["terminal_cost"]["P"] = matrix_to_json(cfg.P);

  Json tops = Json::array();
  for (const Topology& t : cfg.topologies) {
    tops.push_back(Json{{"widths", t.widths}, {"channels", t.channels}});
  }
  Json cert = settings_to_json(cfg.certify);
  cert["alpha"] = to_string(cfg.alpha);
  cert["error_domain"] = cfg.error_domain;
  cert["lipschitz_domain"] = cfg.lipschitz_domain;
  return Json{{"name", cfg.name},
              {"system", sys},
              {"networks",
               {{"exact", cfg.exact}, {"exact_method", cfg.exact_method}, {"topologies", tops}}},
              {"certification", cert},
              {"training",
               {{"samples", cfg.samples},
                {"epochs", cfg.training.epochs},
                {"batch", cfg.training.batch},
                {"step", cfg.training.step},
                {"data_seed", cfg.data_seed}}},
              {"seed", cfg.seed},
              {"out", cfg.out}};
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json(read_json_file(path));
}

OcpSpec ocp_from_config(const ExperimentConfig& cfg) {
  cfg.validate();
  OcpSpec s;
  s.A = cfg.A;
  s.B = cfg.B;
  s.Q = cfg.Q;
  s.R = cfg.R;
  s.N = cfg.N;
  s.X = cfg.X;
  s.U = cfg.U;
  s.P = cfg.terminal_cost_mode == "dare" ? dare(s.A, s.B, s.Q, s.R) : cfg.P;
  if (cfg.terminal_set_mode == "moas") {
    const Matrix K = lqr_gain(s.A, s.B, s.R, s.P);
    const Polytope admissible = s.X.intersect(Polytope(s.U.A * K, s.U.b));
    s.T = max_output_admissible_set(s.A + s.B * K, admissible);
  } else {
    s.T = cfg.T;
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

}  // namespace maxcert
