#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gts/meta_learner.hpp"
#include "gts/task_space.hpp"

namespace gts {

struct SweepEntry {
  TaskParam task;
  double coordinate = 0.0;
  double post = 0.0;
  double pre = 0.0;
  std::vector<double> per_seed_post;  // filled by average_sweeps()
};

/// Scores over a grid of tasks, strictly increasing in difficulty coordinate.
struct SweepResult {
  std::vector<SweepEntry> entries;
  double step = 0.05;

  void validate() const;
};

/// R(tau) - max R over the sweep, using post-adaptation scores. tau must be
/// within step/2 of a grid point.
double bias_score(const SweepResult& sweep, double tau);

struct RangeStat {
  double lo = 0.0;
  double hi = 0.0;
  double mean = 0.0;
  double variance = 0.0;  // population
  int count = 0;
};

struct BiasPoint {
  double tau = 0.0;
  double bias = 0.0;
};

struct RobustnessSummary {
  double highest_score = 0.0;
  double tau_at_highest = 0.0;
  std::vector<RangeStat> ranges;
  std::vector<BiasPoint> bias;
  std::optional<double> min_negative_tau;

  /// Row labels of the comparison table, snake_cased; `symbol` names the task
  /// coordinate ("v" for velocity).
  nlohmann::json to_json(const std::string& symbol) const;
};

struct TauRange {
  double lo = 0.0;
  double hi = 0.0;
};

RobustnessSummary summarize(const SweepResult& sweep, std::span<const TauRange> ranges,
                            std::span<const double> bias_points);

/// Grid lo, lo+step, ..., hi (the last point snaps to hi when within step/2).
std::vector<double> sweep_grid(double lo, double hi, double step);

/// Pre- and post-adaptation scores for each grid task, starting every task
/// from the same theta. Pre and post rollouts of one task share their random
/// stream, so alpha = 0 reproduces the pre score exactly. Radial coordinates
/// are lifted at golden-angle increments.
SweepResult evaluate_sweep(const Eigen::VectorXd& theta, const TaskObjective& objective,
                           DifficultyCoordinate coord, const TaskBounds& test_bounds, double step,
                           const MetaConfig& config, std::uint64_t seed);

/// Pointwise mean over seeds; per-seed post scores are kept on each entry.
SweepResult average_sweeps(std::span<const SweepResult> sweeps);

/// Formats a tau value for a summary key: 0.5 -> "0_5", -1 -> "m1".
std::string tau_key(double tau);

}  // namespace gts
