#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "gts/config.hpp"
#include "gts/error.hpp"
#include "gts/format.hpp"
#include "gts/invariants.hpp"
#include "gts/runner.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kConfigError = 2;
constexpr int kRunError = 3;

std::pair<double, double> parse_bounds(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw gts::ConfigError("--bounds expects lo,hi");
  return {gts::parse_double(text.substr(0, comma)), gts::parse_double(text.substr(comma + 1))};
}

int cmd_run(const std::string& config_path, const std::vector<std::uint64_t>& seeds,
            const std::string& method, const std::string& out, const std::string& resume,
            int stop_before, int workers, bool verbose) {
  gts::ExperimentConfig config;
  try {
    config = gts::ExperimentConfig::load(config_path);
    if (!method.empty()) config.method = gts::method_from_string(method);
    if (!seeds.empty()) config.seeds = seeds;
    if (!out.empty()) config.output_dir = out;
    if (workers > 0) config.workers = workers;
    config.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  gts::RunOptions options;
  options.verbose = verbose;
  if (stop_before >= 0) options.stop_before_epoch = stop_before;
  try {
    if (!resume.empty()) {
      if (config.seeds.size() != 1) throw gts::ConfigError("--resume needs exactly one seed");
      options.resume_from = resume;
      const auto r = gts::run_seed(config, config.seeds.front(), options);
      std::cout << r.directory.string() << '\n';
      if (r.summary) std::cout << r.summary->to_json(config.symbol()).dump(2) << '\n';
      return 0;
    }
    const auto result = gts::run_experiment(config, options);
    for (const auto& s : result.seeds) std::cout << s.directory.string() << '\n';
    if (result.mean_summary) std::cout << result.mean_summary->to_json(config.symbol()).dump(2) << '\n';
  } catch (const gts::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kRunError;
  }
  return 0;
}

int cmd_evaluate(const std::string& checkpoint, const std::string& bounds, double step,
                 const std::string& out, std::uint64_t seed, int workers) {
  try {
    auto [config, state] = gts::read_checkpoint(checkpoint);
    const auto [lo, hi] = parse_bounds(bounds);
    config.test_tau_min = lo;
    config.test_tau_max = hi;
    config.test_step = step;
    if (workers > 0) config.workers = workers;
    config.validate();
    const gts::RolloutObjective objective(config.env_spec(), config.architecture(), config.n_samples,
                                          config.horizon, config.gamma);
    const auto sweep = gts::evaluate_sweep(state.theta, objective, config.task_space().coord,
                                           config.test_bounds(), step, config.meta(), seed);
    const auto summary = gts::summarize(sweep, config.resolved_ranges(), config.resolved_bias_points());
    const fs::path dir = out.empty() ? fs::path(checkpoint).parent_path().parent_path() / "evaluate" : fs::path(out);
    fs::create_directories(dir);
    gts::write_sweep_csv(dir / "sweep.csv", sweep);
    std::ofstream(dir / "summary.json") << summary.to_json(config.symbol()).dump(2) << '\n';
    std::ofstream(dir / "config.txt") << config.to_text();
    std::cout << summary.to_json(config.symbol()).dump(2) << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "evaluate failed: " << e.what() << '\n';
    return kRunError;
  }
  return 0;
}

int cmd_compare(const std::string& a, const std::string& b) {
  try {
    std::cout << gts::compare_runs(a, b).dump(2) << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "compare failed: " << e.what() << '\n';
    return kRunError;
  }
  return 0;
}

int cmd_selftest() {
  bool ok = true;
  for (const auto& check : gts::run_invariant_checks()) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
    ok = ok && check.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Region-scheduled guided task sampling for meta-RL"};
  app.require_subcommand(1);

  std::string config_path, method, out, resume;
  std::vector<std::uint64_t> seeds;
  int stop_before = -1;
  int workers = 0;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "Train one or more seeds and evaluate the final policy");
  run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seeds, "override the seed list");
  run->add_option("--method", method, "rmrl_gts | approach1_only | approach2_only | uniform_maml");
  run->add_option("--out", out, "override output_dir");
  run->add_option("--resume", resume, "resume from a checkpoint")->check(CLI::ExistingFile);
  run->add_option("--stop-before-epoch", stop_before, "checkpoint and stop before this epoch");
  run->add_option("--workers", workers, "rollout threads");
  run->add_flag("-v,--verbose", verbose, "print per-epoch progress");

  std::string checkpoint, bounds, eval_out;
  double step = 0.05;
  std::uint64_t eval_seed = 1;
  auto* evaluate = app.add_subcommand("evaluate", "Sweep a checkpointed policy over a task range");
  evaluate->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--bounds", bounds, "lo,hi")->required();
  evaluate->add_option("--step", step)->required();
  evaluate->add_option("--out", eval_out, "output directory");
  evaluate->add_option("--seed", eval_seed, "rollout seed");
  evaluate->add_option("--workers", workers, "rollout threads");

  std::string dir_a, dir_b;
  auto* compare = app.add_subcommand("compare", "Compare the sweeps of two runs");
  compare->add_option("dir_a", dir_a)->required()->check(CLI::ExistingDirectory);
  compare->add_option("dir_b", dir_b)->required()->check(CLI::ExistingDirectory);

  auto* selftest = app.add_subcommand("selftest", "Run the quick invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  if (*run) return cmd_run(config_path, seeds, method, out, resume, stop_before, workers, verbose);
  if (*evaluate) return cmd_evaluate(checkpoint, bounds, step, eval_out, eval_seed, workers);
  if (*compare) return cmd_compare(dir_a, dir_b);
  if (*selftest) return cmd_selftest();
  return kConfigError;
}
