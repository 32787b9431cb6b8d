#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gts/envs.hpp"
#include "gts/guided_sampler.hpp"
#include "gts/meta_learner.hpp"
#include "gts/metrics.hpp"
#include "gts/policy.hpp"
#include "gts/task_space.hpp"

namespace gts {

enum class Method { rmrl_gts, approach1_only, approach2_only, uniform_maml };

const char* to_string(Method m);
Method method_from_string(const std::string& text);

/// Whether the method schedules easy/middle regions.
bool uses_regions(Method m);
/// Whether the method samples from the score-derived distribution.
bool uses_scores(Method m);

/// Fully resolved experiment settings. Text form is one `key = value` per
/// line, `#` starts a comment, lists are comma-separated.
struct ExperimentConfig {
  EnvKind env = EnvKind::velocity1d;
  Method method = Method::rmrl_gts;
  double tau_min = 0.0;
  double tau_max = 3.0;
  int n_epoch = 200;
  int n_batch = 40;
  int n_samples = 20;
  int n_interval = 10;
  double d_tau_bin = 0.1;
  double delta = 0.1;
  double alpha = 0.01;
  double beta = 0.01;
  double gamma = 0.99;
  int horizon = 100;
  std::vector<std::uint64_t> seeds{1};
  double test_tau_min = 0.0;
  double test_tau_max = 5.0;
  double test_step = 0.05;
  std::string output_dir = "runs";
  std::vector<int> hidden{64, 64};
  double init_log_std = 0.0;
  double grad_clip = 10.0;
  int workers = 1;
  int checkpoint_every = 50;
  std::vector<TauRange> summary_ranges;  // empty: train and test ranges
  std::vector<double> bias_points;       // empty: integers in the train range
  bool dump_curves = true;

  static ExperimentConfig defaults(EnvKind env);
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
  std::string to_text() const;
  void validate() const;

  TaskBounds train_bounds() const { return {tau_min, tau_max}; }
  TaskBounds test_bounds() const { return {test_tau_min, test_tau_max}; }
  TaskSpace task_space() const;
  EnvSpec env_spec() const;
  MetaConfig meta() const;
  SamplerConfig sampler() const;
  PolicyArchitecture architecture() const;
  std::vector<TauRange> resolved_ranges() const;
  std::vector<double> resolved_bias_points() const;
  /// Coordinate name used in summary keys.
  std::string symbol() const { return env == EnvKind::velocity1d ? "v" : "r"; }
};

}  // namespace gts
