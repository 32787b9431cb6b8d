#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "gts/config.hpp"
#include "gts/metrics.hpp"
#include "gts/region_scheduler.hpp"
#include "gts/score_model.hpp"

namespace gts {

/// One epoch of the run log, in the order things happened: the sampled tasks
/// with their post-adaptation scores, then any region change.
struct EpochRecord {
  int epoch = 0;
  std::vector<TaskScore> scores;
  std::optional<RegionPartition> partition;  // set when the partition was created or changed
  double wall_seconds = 0.0;
};

struct RunLog {
  std::vector<EpochRecord> epochs;
};

/// Everything needed to continue a seed's epoch loop.
struct RunState {
  std::uint64_t seed = 0;
  int next_epoch = 0;
  PolicyParams theta;
  Rng sampler_rng;
  ScoreTable table{TaskBounds{0.0, 1.0}, 0.1};
  std::optional<double> tau_mean;
  std::optional<Schedule> schedule;
  std::optional<RegionPartition> partition;
};

/// Versioned JSON checkpoint: architecture, theta, log-std, epoch and rng
/// state, plus the score history and regions so a run can resume exactly.
nlohmann::json checkpoint_to_json(const ExperimentConfig& config, const RunState& state);
RunState checkpoint_from_json(const nlohmann::json& j, const ExperimentConfig& config);
void write_checkpoint(const std::filesystem::path& path, const ExperimentConfig& config,
                      const RunState& state);
/// Reads the embedded config and state.
std::pair<ExperimentConfig, RunState> read_checkpoint(const std::filesystem::path& path);

struct RunOptions {
  /// Stop (with a checkpoint) before running this epoch; the sweep is skipped.
  std::optional<int> stop_before_epoch;
  std::optional<std::filesystem::path> resume_from;
  bool evaluate = true;
  bool verbose = false;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::filesystem::path directory;
  RunLog log;
  PolicyParams theta;
  bool finished = false;
  std::optional<SweepResult> sweep;
  std::optional<RobustnessSummary> summary;
};

/// <output_dir>/<method>/<seed>
std::filesystem::path seed_directory(const ExperimentConfig& config, std::uint64_t seed);

/// Epoch loop for one seed: sample, meta-update, record scores, update regions.
/// Writes run.csv, partitions.csv, curves.csv, timing.csv, config.txt,
/// checkpoints/, and after the last epoch sweep.csv and summary.json.
SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, const RunOptions& options = {});

struct ExperimentResult {
  std::vector<SeedResult> seeds;
  std::optional<SweepResult> mean_sweep;
  std::optional<RobustnessSummary> mean_summary;
};

/// Runs every configured seed, then averages their sweeps into
/// <output_dir>/<method>/sweep_mean.csv and summary_mean.json.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep);
SweepResult read_sweep_csv(const std::filesystem::path& path, double step);

/// Loads the seed sweeps under a run directory (a seed directory or a method
/// directory holding seed subdirectories) and averages them.
SweepResult load_run_sweeps(const std::filesystem::path& dir, ExperimentConfig* config_out = nullptr);

/// Side-by-side summaries and per-tau post-score deltas (a - b).
nlohmann::json compare_sweeps(const SweepResult& a, const SweepResult& b,
                              std::span<const TauRange> ranges, std::span<const double> bias_points,
                              const std::string& symbol);
nlohmann::json compare_runs(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b);

}  // namespace gts
