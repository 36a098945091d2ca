#pragma once

// File formats: JSON for networks, laws, certificates, datasets and
// experiment configs; CSV for reports and traces. Doubles are written with
// 17 significant digits so every value reads back bit for bit.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxcert/certify.hpp"
#include "maxcert/maxout.hpp"
#include "maxcert/mpc.hpp"
#include "maxcert/train.hpp"

namespace maxcert {

using Json = nlohmann::json;

/// Malformed or inconsistent input file.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Serializes with %.17g numbers; non-finite values become null.
std::string dump_json(const Json& j, int indent = 2);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
void write_text_file(const std::string& path, const std::string& text);

Json matrix_to_json(const Matrix& M);  // array of rows
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);
Json polytope_to_json(const Polytope& P);  // {A, b}
/// Accepts {A, b} or {lower, upper}.
Polytope polytope_from_json(const Json& j);

/// {input_dim, layers: [{p, w, W, b}], W_out, b_out}
Json network_to_json(const MaxoutNetwork& net);
MaxoutNetwork network_from_json(const Json& j);

/// {domain: {A, b}, regions: [{A, b, K, offset}]}
Json pwa_to_json(const PwaFunction& pwa);
PwaFunction pwa_from_json(const Json& j);

Json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);

Json dataset_to_json(const Dataset& d);
Dataset dataset_from_json(const Json& j);

Json train_report_to_json(const TrainReport& r);
/// epoch,mse
std::string trace_csv(const std::vector<double>& trace);

struct ReportRow {
  int no = 0;
  int w1 = 0;
  int p1 = 0;
  long num_params = 0;
  double mse_root = 0.0;
  double max_err = 0.0;
  double lip = 0.0;
  std::string status = "ok";
};

/// No.,w1,p1,num_params,mse_root,max_err_inf,lip_inf[,status]
std::string report_csv(const std::vector<ReportRow>& rows, bool with_status);

struct Topology {
  std::vector<int> widths;
  std::vector<int> channels;
};

struct ExperimentConfig {
  std::string name;
  Matrix A, B, Q, R;
  int N = 1;
  Polytope X, U;
  std::string terminal_set_mode = "given";  // given | moas
  Polytope T;
  std::string terminal_cost_mode = "given";  // given | dare
  Matrix P;

  bool exact = false;
  std::string exact_method = "dc";  // dc | hinge
  std::vector<Topology> topologies;

  NormKind alpha = NormKind::Inf;
  CertifySettings certify;
  std::string error_domain = "feasible";      // feasible | terminal
  std::string lipschitz_domain = "terminal";  // feasible | terminal

  int samples = 1000;
  TrainOptions training;
  std::uint64_t data_seed = 1;

  std::uint64_t seed = 0;
  std::string out = "out";

  /// Throws ConfigError on inconsistent fields.
  void validate() const;
};

ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

/// OCP with the terminal modes resolved (DARE cost, MOAS set under the
/// LQR gain of the resolved P).
OcpSpec ocp_from_config(const ExperimentConfig& cfg);

}  // namespace maxcert
