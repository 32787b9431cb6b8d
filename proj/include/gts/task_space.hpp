#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>

#include "gts/rng.hpp"

namespace gts {

/// A point in task space: a target velocity (1D) or a goal position (2D).
class TaskParam {
 public:
  TaskParam() = default;
  explicit TaskParam(double v);
  TaskParam(double x, double y);

  /// Throws InputError unless values has 1 or 2 finite entries.
  static TaskParam from_values(std::span<const double> values);

  std::size_t dim() const { return dim_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return {values_.data(), dim_}; }

  friend bool operator==(const TaskParam&, const TaskParam&) = default;

  std::string to_string() const;

 private:
  std::array<double, 2> values_{0.0, 0.0};
  std::size_t dim_ = 1;
};

/// Range of the difficulty coordinate. Either 0 <= tau_min < tau_max, or
/// symmetric with tau_min = -tau_max < 0.
class TaskBounds {
 public:
  TaskBounds(double tau_min, double tau_max);

  double tau_min() const { return tau_min_; }
  double tau_max() const { return tau_max_; }
  bool symmetric() const { return symmetric_; }
  double span() const { return tau_max_ - tau_min_; }

  friend bool operator==(const TaskBounds&, const TaskBounds&) = default;

 private:
  double tau_min_;
  double tau_max_;
  bool symmetric_;
};

/// Maps a task to the scalar used for scheduling; larger means harder.
enum class DifficultyCoordinate { identity, radial };

double difficulty(DifficultyCoordinate coord, const TaskParam& tau);

/// Inverse of difficulty(): a radial coordinate is lifted to a 2D task at a
/// uniformly random angle; the identity coordinate is returned as a 1D task.
TaskParam lift(DifficultyCoordinate coord, double value, Rng& rng);
TaskParam lift_at_angle(DifficultyCoordinate coord, double value, double angle);

/// Everything needed to interpret a task parameter inside one experiment.
struct TaskSpace {
  TaskBounds bounds;
  DifficultyCoordinate coord = DifficultyCoordinate::identity;
  std::size_t dim = 1;
};

/// 1D convenience form; a 2D task throws InputError.
bool contains(const TaskBounds& bounds, const TaskParam& tau);
bool contains(const TaskSpace& space, const TaskParam& tau);

}  // namespace gts
