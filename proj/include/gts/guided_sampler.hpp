#pragma once

#include <vector>

#include "gts/region_scheduler.hpp"
#include "gts/rng.hpp"
#include "gts/score_model.hpp"
#include "gts/task_space.hpp"

namespace gts {

/// Where a planned task came from. Region-scheduled draws carry their region;
/// the epoch-0 sweep and the unrestricted baseline have their own labels.
enum class TaskLabel { easy, middle, grid, uniform };

const char* to_string(TaskLabel label);
TaskLabel task_label_from_string(const std::string& text);

struct PlannedTask {
  TaskParam task;
  double coordinate = 0.0;
  TaskLabel label = TaskLabel::grid;
};

struct SamplingPlan {
  int epoch = 0;
  std::vector<PlannedTask> tasks;
};

struct SamplerConfig {
  int n_batch = 40;
  double delta = 0.1;      // uniform-mixture rate inside the easy region
  double d_tau_bin = 0.1;  // jitter width around a drawn bin center

  void validate() const;
};

/// n_batch tasks evenly spaced over [tau_min, tau_max], both ends included.
/// Radial coordinates are lifted to 2D at random angles.
SamplingPlan epoch0_grid(const TaskSpace& space, int n_batch, Rng& rng);
SamplingPlan epoch0_grid(const TaskBounds& bounds, int n_batch);

/// Region-respecting prioritized batch: ceil(n/2) draws in the easy region
/// (uniform with probability delta, otherwise from dist restricted to the easy
/// bins), the rest from dist restricted to the middle region. Symmetric
/// partitions split middle draws evenly between the two lobes. Bin-center draws
/// are jittered within one bin width and clamped back into their region.
SamplingPlan sample_batch(const RegionPartition& partition, const BinDistribution& dist,
                          const SamplerConfig& config, DifficultyCoordinate coord, Rng& rng);

/// Same split as sample_batch, but uniform inside each region.
SamplingPlan sample_regions_uniform(const RegionPartition& partition, const SamplerConfig& config,
                                    DifficultyCoordinate coord, Rng& rng);

/// n tasks uniform over the whole bounds.
SamplingPlan sample_uniform(const TaskBounds& bounds, int n, DifficultyCoordinate coord, Rng& rng);

/// Uniform draw from a non-empty interval set.
double sample_in(const IntervalSet& set, Rng& rng);

}  // namespace gts
