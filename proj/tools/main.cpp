#include <cstdio>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace maxcert;

int main(int argc, char** argv) {
  CLI::App app{"Certify maxout network approximations of explicit MPC laws"};
  app.require_subcommand(1);

  std::string config;
  cli::Overrides o;
  std::string alpha, out;
  std::uint64_t seed = 0;
  double epsilon = 0, big_m = 0, gap_tol = 0;
  long node_limit = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Experiment config JSON")->required();
    sub->add_option("--seed", seed, "Training seed");
    sub->add_option("--alpha", alpha, "Norm: 1 or inf");
    sub->add_option("--epsilon", epsilon, "Activation margin for the Lipschitz MILP");
    sub->add_option("--big-m", big_m, "Big-M bound on channel spreads");
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--gap-tol", gap_tol, "Relative MILP gap tolerance");
    sub->add_option("--node-limit", node_limit, "Branch-and-bound node limit");
  };

  auto* explicit_cmd = app.add_subcommand("explicit", "Solve the explicit MPC law");
  auto* synth_cmd = app.add_subcommand("synthesize", "Build and certify an exact network");
  auto* train_cmd = app.add_subcommand("train", "Train the configured topologies");
  auto* certify_cmd = app.add_subcommand("certify", "Certify max error and Lipschitz constant");
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the closed loop");
  auto* table_cmd = app.add_subcommand("table", "Train, certify and report every topology");
  for (CLI::App* sub : {explicit_cmd, synth_cmd, train_cmd, certify_cmd, sim_cmd, table_cmd}) {
    common(sub);
  }

  std::string net_path, pwa_path;
  int row = 1;
  certify_cmd->add_option("--net", net_path, "Network JSON")->required();
  certify_cmd->add_option("--pwa", pwa_path, "Explicit law JSON (solved from the config if absent)");
  certify_cmd->add_option("--row", row, "Row number for the CSV");

  std::string controller = "mpc", x0;
  int steps = 20;
  sim_cmd->add_option("--controller", controller, "Network or law JSON, or 'mpc'");
  sim_cmd->add_option("--x0", x0, "Initial state, comma-separated")->required();
  sim_cmd->add_option("--steps", steps, "Number of steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
  CLI::App* sub = app.get_subcommands().front();
  if (given(sub, "--seed")) o.seed = seed;
  if (given(sub, "--alpha")) o.alpha = alpha;
  if (given(sub, "--epsilon")) o.epsilon = epsilon;
  if (given(sub, "--big-m")) o.big_m = big_m;
  if (given(sub, "--out")) o.out = out;
  if (given(sub, "--gap-tol")) o.gap_tol = gap_tol;
  if (given(sub, "--node-limit")) o.node_limit = node_limit;

  try {
    const ExperimentConfig cfg = cli::load(config, o);
    if (sub == explicit_cmd) return cli::cmd_explicit(cfg);
    if (sub == synth_cmd) return cli::cmd_synthesize(cfg);
    if (sub == train_cmd) return cli::cmd_train(cfg);
    if (sub == certify_cmd) return cli::cmd_certify(cfg, net_path, pwa_path, row);
    if (sub == sim_cmd) return cli::cmd_simulate(cfg, controller, x0, steps);
    return cli::cmd_table(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "[maxcert] error: %s\n", e.what());
    return cli::exit_code(e);
  }
}
