#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <memory>
#include <sstream>

#include "maxcert/exact.hpp"

namespace maxcert::cli {
namespace {

__attribute__((format(printf, 1, 2))) void log(const char* fmt, ...) {
  char buf[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  std::fprintf(stderr, "[maxcert] %s\n", buf);
}

std::string path_in(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out) / name).string();
}

struct Law {
  OcpSpec spec;
  ParametricQp qp;
  PwaFunction pwa;
  ExplicitMpcReport report;
};

Law solve_law(const ExperimentConfig& cfg) {
  Law law;
  law.spec = ocp_from_config(cfg);
  law.qp = condense(law.spec);
  law.pwa = explicit_mpc(law.qp, &law.report);
  return law;
}

const Polytope& domain_named(const std::string& name, const Law& law) {
  return name == "terminal" ? law.spec.T : law.pwa.domain;
}

std::string summary(const Polytope& P) {
  auto [lo, hi] = bounding_box(P);
  std::ostringstream os;
  os << P.num_rows() << " half-spaces, box [";
  for (int i = 0; i < P.dim(); ++i) {
    os << (i ? "; " : "") << lo(i) << ", " << hi(i);
  }
  os << "]";
  return os.str();
}

MaxoutNetwork synthesize(const ExperimentConfig& cfg, const PwaFunction& pwa,
                         ExactReport* rep) {
  if (cfg.exact_method == "hinge") {
    MaxoutNetwork net = build_exact_1d(pwa);
    rep->p1 = net.layers[0].p;
    rep->num_params = param_count(net);
    return net;
  }
  ExactOptions o;
  o.settings = cfg.certify;
  o.certify = false;
  return build_exact_type1(pwa, o, rep);
}

std::string row_name(const std::string& stem, int row, const std::string& ext) {
  return stem + "_row" + std::to_string(row) + ext;
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

Vector saturate(const Vector& u, const Polytope& U) {
  if (contains(U, u, 0.0)) return u;
  auto [lo, hi] = bounding_box(U);
  return u.cwiseMax(lo).cwiseMin(hi);
}

Vector parse_point(const std::string& text, int n) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("--x0: cannot parse '" + item + "'");
    }
  }
  if (static_cast<int>(vals.size()) != n) {
    throw ConfigError("--x0: expected " + std::to_string(n) + " comma-separated values");
  }
  return Eigen::Map<Vector>(vals.data(), n);
}

}  // namespace

ExperimentConfig load(const std::string& path, const Overrides& o) {
  ExperimentConfig cfg = load_config(path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.alpha) {
    try {
      cfg.alpha = parse_norm(*o.alpha);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.epsilon) cfg.certify.eps = *o.epsilon;
  if (o.big_m) cfg.certify.big_m = *o.big_m;
  if (o.out) cfg.out = *o.out;
  if (o.gap_tol) cfg.certify.gap_tol = *o.gap_tol;
  if (o.node_limit) cfg.certify.node_limit = *o.node_limit;
  cfg.validate();
  return cfg;
}

int cmd_explicit(const ExperimentConfig& cfg) {
  const Law law = solve_law(cfg);
  write_json_file(path_in(cfg, "pwa.json"), pwa_to_json(law.pwa));
  log("regions: %d (%d before merging)", law.pwa.num_regions(),
      law.report.regions_before_merge);
  log("F_N: %s", summary(law.pwa.domain).c_str());
  const double jump = max_discontinuity(law.pwa);
  log("continuity: %s (largest jump %.3g)", jump <= 1e-9 ? "continuous" : "DISCONTINUOUS",
      jump);
  for (const std::string& w : law.report.warnings) log("warning: %s", w.c_str());
  log("wrote %s", path_in(cfg, "pwa.json").c_str());
  return 0;
}

int cmd_synthesize(const ExperimentConfig& cfg) {
  const Law law = solve_law(cfg);
  ExactReport rep;
  const MaxoutNetwork net = synthesize(cfg, law.pwa, &rep);
  write_json_file(path_in(cfg, "network_exact.json"), network_to_json(net));
  log("exact network (%s): p1 = %d, %ld parameters", cfg.exact_method.c_str(), rep.p1,
      rep.num_params);
  const Certificate c = max_error(law.pwa, net, law.pwa.domain, NormKind::Inf, cfg.certify);
  log("certified max error over F_N: %.3g (gap %.3g, %ld nodes)", c.value, c.gap, c.nodes);
  log("wrote %s", path_in(cfg, "network_exact.json").c_str());
  if (c.status != SolveStatus::Optimal || c.value > 1e-6) {
    throw CertificationError("synthesize: certified error " + std::to_string(c.value) +
                             " exceeds 1e-6");
  }
  return 0;
}

int cmd_train(const ExperimentConfig& cfg) {
  const Law law = solve_law(cfg);
  const Dataset data = sample_dataset(law.pwa, cfg.samples, cfg.data_seed, &law.qp);
  write_json_file(path_in(cfg, "dataset.json"), dataset_to_json(data));
  TrainOptions o = cfg.training;
  o.seed = cfg.seed;
  for (size_t k = 0; k < cfg.topologies.size(); ++k) {
    const Topology& t = cfg.topologies[k];
    const int row = static_cast<int>(k) + 1;
    const MaxoutNetwork init = random_init(law.pwa.state_dim(), t.widths, t.channels,
                                           law.pwa.output_dim(), cfg.seed);
    const TrainReport r = train(init, data, o);
    write_json_file(path_in(cfg, row_name("network", row, ".json")),
                    network_to_json(r.network));
    write_json_file(path_in(cfg, row_name("train", row, ".json")), train_report_to_json(r));
    write_text_file(path_in(cfg, row_name("trace", row, ".csv")), trace_csv(r.mse_trace));
    log("row %d: %ld parameters, mse_root %.3g -> %.3g (%d halvings)", row,
        param_count(r.network), std::sqrt(r.initial_mse), std::sqrt(r.final_mse),
        r.halvings);
  }
  return 0;
}

int cmd_certify(const ExperimentConfig& cfg, const std::string& net_path,
                const std::string& pwa_path, int row) {
  const MaxoutNetwork net = network_from_json(read_json_file(net_path));
  Law law;
  if (pwa_path.empty()) {
    law = solve_law(cfg);
  } else {
    law.spec = ocp_from_config(cfg);
    law.pwa = pwa_from_json(read_json_file(pwa_path));
  }
  if (net.input_dim != law.pwa.state_dim() || net.output_dim() != law.pwa.output_dim()) {
    throw ConfigError("certify: network and law dimensions differ");
  }
  const Dataset data = sample_dataset(law.pwa, cfg.samples, cfg.data_seed);
  const Certificate e =
      max_error(law.pwa, net, domain_named(cfg.error_domain, law), cfg.alpha, cfg.certify);
  write_json_file(path_in(cfg, "certificate_max_error.json"), certificate_to_json(e));
  log("max error (%s): %.17g, gap %.3g, %ld nodes, %.2f s", to_string(cfg.alpha).c_str(),
      e.value, e.gap, e.nodes, e.wall_time);
  if (e.status == SolveStatus::GapLimit) {
    log("node limit reached; certificate is partial");
    return 3;
  }
  const Certificate l =
      lipschitz(law.pwa, net, domain_named(cfg.lipschitz_domain, law), cfg.alpha, cfg.certify);
  write_json_file(path_in(cfg, "certificate_lipschitz.json"), certificate_to_json(l));
  log("lipschitz (%s): %.17g, gap %.3g, %ld nodes, %.2f s", to_string(cfg.alpha).c_str(),
      l.value, l.gap, l.nodes, l.wall_time);
  if (l.status == SolveStatus::GapLimit) {
    log("node limit reached; certificate is partial");
    return 3;
  }
  ReportRow r;
  r.no = row;
  r.w1 = net.layers[0].w;
  r.p1 = net.layers[0].p;
  r.num_params = param_count(net);
  r.mse_root = std::sqrt(mse(net, data));
  r.max_err = e.value;
  r.lip = l.value;
  write_text_file(path_in(cfg, "certify.csv"), report_csv({r}, false));
  log("wrote %s", path_in(cfg, "certify.csv").c_str());
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& controller,
                 const std::string& x0_text, int steps) {
  if (steps < 0) throw ConfigError("simulate: --steps must be ≥ 0");
  const OcpSpec spec = ocp_from_config(cfg);
  const ParametricQp qp = condense(spec);
  Vector x = parse_point(x0_text, spec.state_dim());
  mpc_point(qp, x);  // throws InfeasibleStateError outside F_N

  std::function<Vector(const Vector&)> policy;
  if (controller == "mpc") {
    policy = [&qp](const Vector& s) { return mpc_point(qp, s); };
  } else {
    const Json j = read_json_file(controller);
    if (j.contains("layers")) {
      auto net = std::make_shared<MaxoutNetwork>(network_from_json(j));
      if (net->input_dim != spec.state_dim() || net->output_dim() != spec.input_dim()) {
        throw ConfigError("simulate: controller dimensions do not match the system");
      }
      policy = [net](const Vector& s) { return eval(*net, s); };
    } else {
      auto pwa = std::make_shared<PwaFunction>(pwa_from_json(j));
      if (pwa->state_dim() != spec.state_dim() || pwa->output_dim() != spec.input_dim()) {
        throw ConfigError("simulate: controller dimensions do not match the system");
      }
      policy = [pwa](const Vector& s) { return pwa->eval(s); };
    }
  }

  const int n = spec.state_dim();
  const int m = spec.input_dim();
  std::ostringstream csv;
  csv.precision(17);
  csv << "step";
  for (int i = 0; i < n; ++i) csv << ",x" << i + 1;
  for (int i = 0; i < m; ++i) csv << ",u" << i + 1;
  csv << ",cost\n";
  const std::string path = path_in(cfg, "trajectory.csv");
  for (int k = 0; k < steps; ++k) {
    Vector u;
    try {
      u = saturate(policy(x), spec.U);
    } catch (const InfeasibleStateError&) {
      write_text_file(path, csv.str());
      throw;
    }
    const double cost = x.dot(spec.Q * x) + u.dot(spec.R * u);
    csv << k;
    for (int i = 0; i < n; ++i) csv << "," << x(i);
    for (int i = 0; i < m; ++i) csv << "," << u(i);
    csv << "," << cost << "\n";
    x = spec.A * x + spec.B * u;
  }
  write_text_file(path, csv.str());
  log("wrote %s (%d steps, final state norm %.3g)", path.c_str(), steps, x.norm());
  return 0;
}

int cmd_table(const ExperimentConfig& cfg) {
  const Law law = solve_law(cfg);
  std::vector<ReportRow> rows;
  if (cfg.topologies.empty() && !cfg.exact) {
    write_text_file(path_in(cfg, "table.csv"), report_csv(rows, true));
    log("no topologies; wrote header only");
    return 0;
  }
  const Dataset data = sample_dataset(law.pwa, cfg.samples, cfg.data_seed, &law.qp);
  const Polytope& err_domain = domain_named(cfg.error_domain, law);
  const Polytope& lip_domain = domain_named(cfg.lipschitz_domain, law);

  struct Outcome {
    ReportRow row;
    MaxoutNetwork net;
    int code = 0;
  };
  auto run = [&](int index) {
    Outcome out;
    ReportRow& r = out.row;
    r.no = index + 1;
    try {
      if (index < static_cast<int>(cfg.topologies.size())) {
        const Topology& t = cfg.topologies[index];
        TrainOptions o = cfg.training;
        o.seed = cfg.seed;
        out.net = train(random_init(law.pwa.state_dim(), t.widths, t.channels,
                                    law.pwa.output_dim(), cfg.seed),
                        data, o)
                      .network;
      } else {
        ExactReport rep;
        out.net = synthesize(cfg, law.pwa, &rep);
      }
      r.w1 = out.net.layers[0].w;
      r.p1 = out.net.layers[0].p;
      r.num_params = param_count(out.net);
      r.mse_root = std::sqrt(mse(out.net, data));
      const Certificate e = max_error(law.pwa, out.net, err_domain, cfg.alpha, cfg.certify);
      const Certificate l = lipschitz(law.pwa, out.net, lip_domain, cfg.alpha, cfg.certify);
      r.max_err = e.value;
      r.lip = l.value;
      if (e.status == SolveStatus::GapLimit || l.status == SolveStatus::GapLimit) {
        r.status = "node-limit";
        out.code = 3;
      }
    } catch (const std::exception& ex) {
      r.status = "error: " + sanitize(ex.what());
      out.code = exit_code(ex);
    }
    return out;
  };

  const int total = static_cast<int>(cfg.topologies.size()) + (cfg.exact ? 1 : 0);
  std::vector<std::future<Outcome>> jobs;
  for (int i = 0; i < total; ++i) jobs.push_back(std::async(std::launch::async, run, i));
  int ok = 0;
  int code = 0;
  for (int i = 0; i < total; ++i) {
    Outcome out = jobs[i].get();
    if (out.code == 0) {
      ++ok;
      write_json_file(path_in(cfg, row_name("network", i + 1, ".json")),
                      network_to_json(out.net));
    } else {
      code = out.code;
    }
    const ReportRow& r = out.row;
    log("row %d: w1=%d p1=%d #p=%ld mse_root=%.3g max_err=%.3g lip=%.3g [%s]", r.no, r.w1,
        r.p1, r.num_params, r.mse_root, r.max_err, r.lip, r.status.c_str());
    rows.push_back(out.row);
  }
  write_text_file(path_in(cfg, "table.csv"), report_csv(rows, true));
  log("wrote %s", path_in(cfg, "table.csv").c_str());
  return ok > 0 ? 0 : code;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 1;
  if (dynamic_cast<const ModelError*>(&e) || dynamic_cast<const EmptyPolytopeError*>(&e)) {
    return 2;
  }
  return 3;
}

}  // namespace maxcert::cli
