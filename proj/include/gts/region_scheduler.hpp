#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gts/task_space.hpp"

namespace gts {

/// Interval on the difficulty coordinate with explicit end closure.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = false;

  bool empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
  double length() const { return empty() ? 0.0 : hi - lo; }
  bool contains(double x) const;
  /// Nearest representable point of the interval to x. Requires !empty().
  double clamp(double x) const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Union of disjoint intervals, ordered by position. Empty pieces are dropped.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(std::initializer_list<Interval> pieces);

  void add(const Interval& piece);
  bool empty() const { return pieces_.empty(); }
  double length() const;
  bool contains(double x) const;
  const std::vector<Interval>& pieces() const { return pieces_; }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> pieces_;
};

enum class Region { easy, middle, difficult };

const char* to_string(Region r);

/// The easy / middle / difficult split of the task range. Built only through
/// make_partition() so the regions always agree with the two boundaries.
struct RegionPartition {
  double tau_middle1 = 0.0;
  double tau_middle2 = 0.0;
  TaskBounds bounds{0.0, 1.0};
  IntervalSet easy;
  IntervalSet middle;
  IntervalSet difficult;

  const IntervalSet& region(Region r) const;
  /// Region that owns x; nullopt outside the bounds.
  std::optional<Region> region_of(double x) const;

  friend bool operator==(const RegionPartition&, const RegionPartition&) = default;
};

/// Builds the regions for boundaries m1 <= m2 (clamped to tau_max). Any region
/// whose upper end reaches tau_max includes it; a region starting at tau_max is
/// empty. For symmetric bounds the boundaries are magnitudes and every region
/// is mirrored about zero.
RegionPartition make_partition(double tau_middle1, double tau_middle2, const TaskBounds& bounds);

/// Whole range as the easy region; used when regions are not scheduled.
RegionPartition whole_range_partition(const TaskBounds& bounds);

struct Schedule {
  int n_epoch = 0;
  int n_interval = 0;
  int n_batch_epochs = 0;  // epochs between region changes
  int half_epoch = 0;      // first change epoch
  double d_tau = 0.0;      // boundary increment per change
};

/// n_batch_epochs = floor(0.5 n_epoch / n_interval), at least one.
/// d_tau = (tau_max - |tau_mean|) / n_interval.
Schedule make_schedule(int n_epoch, int n_interval, const TaskBounds& bounds, double tau_mean);

struct ScoredTask {
  TaskParam task;
  double score = 0.0;
};

/// Difficulty of the task whose score is nearest the mean score. Ties go to
/// the smaller |difficulty|. Throws StateError on an empty list.
double estimate_tau_mean(std::span<const ScoredTask> epoch0_scores,
                         DifficultyCoordinate coord = DifficultyCoordinate::identity);

RegionPartition initial_partition(double tau_mean, const Schedule& schedule,
                                  const TaskBounds& bounds);

/// Region transition for the given epoch. Changes happen at
/// half_epoch + k * n_batch_epochs for k < n_interval; otherwise returns the
/// partition unchanged.
RegionPartition advance(const RegionPartition& partition, const Schedule& schedule, int epoch);

/// True when advance() changes the partition at this epoch.
bool is_change_epoch(const Schedule& schedule, int epoch);

}  // namespace gts
