#pragma once

#include <optional>
#include <string>

#include "maxcert/io.hpp"

namespace maxcert::cli {

/// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> alpha;
  std::optional<double> epsilon;
  std::optional<double> big_m;
  std::optional<std::string> out;
  std::optional<double> gap_tol;
  std::optional<long> node_limit;
};

ExperimentConfig load(const std::string& path, const Overrides& o);

// Each command returns the process exit code; errors propagate as
// exceptions and are mapped by exit_code().
int cmd_explicit(const ExperimentConfig& cfg);
int cmd_synthesize(const ExperimentConfig& cfg);
int cmd_train(const ExperimentConfig& cfg);
int cmd_certify(const ExperimentConfig& cfg, const std::string& net_path,
                const std::string& pwa_path, int row);
int cmd_simulate(const ExperimentConfig& cfg, const std::string& controller,
                 const std::string& x0, int steps);
int cmd_table(const ExperimentConfig& cfg);

/// 1 config, 2 infeasible/degenerate model, 3 numerical.
int exit_code(const std::exception& e);

}  // namespace maxcert::cli
