#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gts/task_space.hpp"

namespace gts {

double mean_total_reward(std::span<const double> rollout_returns);

struct ScoreRecord {
  TaskParam tau;
  double coordinate = 0.0;  // difficulty coordinate of tau
  int epoch = 0;
  double r_mean = 0.0;
};

/// Append-only score history binned on the difficulty coordinate in cells
/// [tau_min + k*w, tau_min + (k+1)*w). The last cell also owns tau_max.
class ScoreTable {
 public:
  ScoreTable(TaskBounds bounds, double d_tau_bin);

  void add(ScoreRecord record);
  const std::vector<ScoreRecord>& records() const { return records_; }
  const TaskBounds& bounds() const { return bounds_; }
  double d_tau_bin() const { return d_tau_bin_; }
  int current_epoch() const { return current_epoch_; }

  int bin_count() const { return bin_count_; }
  int bin_index(double coordinate) const;
  double bin_start(int k) const;
  /// Midpoint of the cell after clipping it to the bounds.
  double bin_center(int k) const;

 private:
  TaskBounds bounds_;
  double d_tau_bin_;
  int bin_count_;
  int current_epoch_ = 0;
  std::vector<ScoreRecord> records_;
};

/// Epoch-weighted bin score: (1/n_bin) * sum(epoch * r_mean) over the records
/// in the cell starting at bin_start. nullopt when the cell has no records.
std::optional<double> weighted_bin_score(const ScoreTable& table, double bin_start);

/// Natural cubic spline (zero second derivative at both ends) through strictly
/// increasing knots. Two knots give the straight line. Outside the knot range
/// the end values are held constant.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y);
  ~CubicSpline();
  CubicSpline(CubicSpline&&) noexcept;
  CubicSpline& operator=(CubicSpline&&) noexcept;
  CubicSpline(const CubicSpline&) = delete;
  CubicSpline& operator=(const CubicSpline&) = delete;

  double operator()(double x) const;
  const std::vector<double>& knots_x() const { return x_; }
  const std::vector<double>& knots_y() const { return y_; }

 private:
  struct Impl;
  std::vector<double> x_;
  std::vector<double> y_;
  std::unique_ptr<Impl> impl_;
};

struct ScoreCurve {
  std::vector<double> knot_x;
  std::vector<double> knot_y;
  std::shared_ptr<const CubicSpline> interpolant;
  std::vector<double> centers;     // every bin center across the bounds
  std::vector<double> values;      // interpolated, clipped to the knot range
  std::vector<double> normalized;  // min-max scaled to [0,1]; 0.5 when flat
  double bin_width = 0.0;
};

/// Needs at least two non-empty bins (StateError otherwise).
ScoreCurve build_curve(const ScoreTable& table);

/// Min-max scaling; a constant input maps to 0.5 everywhere.
std::vector<double> min_max_normalize(std::span<const double> values);

/// Discrete distribution over bin centers.
struct BinDistribution {
  std::vector<double> centers;
  std::vector<double> probs;
  double bin_width = 0.0;

  static BinDistribution uniform(std::vector<double> centers, double bin_width);
};

/// p = (1 - f) / sum(1 - f); uniform when every bin has f = 1.
BinDistribution probability(const ScoreCurve& curve);
BinDistribution probability(std::span<const double> centers, std::span<const double> normalized,
                            double bin_width);

}  // namespace gts
