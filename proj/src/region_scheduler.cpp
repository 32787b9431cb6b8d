#include "gts/region_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gts/error.hpp"

namespace gts {

bool Interval::contains(double x) const {
  const bool above = lo_closed ? x >= lo : x > lo;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

double Interval::clamp(double x) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double y = std::clamp(x, lo, hi);
  if (!lo_closed && y <= lo) y = std::nextafter(lo, inf);
  if (!hi_closed && y >= hi) y = std::nextafter(hi, -inf);
  return y;
}

IntervalSet::IntervalSet(std::initializer_list<Interval> pieces) {
  for (const auto& p : pieces) add(p);
}

void IntervalSet::add(const Interval& piece) {
  if (piece.empty()) return;
  auto pos = std::find_if(pieces_.begin(), pieces_.end(),
                          [&](const Interval& q) { return q.lo > piece.lo; });
  pieces_.insert(pos, piece);
}

double IntervalSet::length() const {
  double total = 0.0;
  for (const auto& p : pieces_) total += p.length();
  return total;
}

bool IntervalSet::contains(double x) const {
  return std::any_of(pieces_.begin(), pieces_.end(),
                     [x](const Interval& p) { return p.contains(x); });
}

const char* to_string(Region r) {
  switch (r) {
    case Region::easy: return "easy";
    case Region::middle: return "middle";
    case Region::difficult: return "difficult";
  }
  return "?";
}

const IntervalSet& RegionPartition::region(Region r) const {
  switch (r) {
    case Region::easy: return easy;
    case Region::middle: return middle;
    case Region::difficult: return difficult;
  }
  return easy;
}

std::optional<Region> RegionPartition::region_of(double x) const {
  for (Region r : {Region::easy, Region::middle, Region::difficult})
    if (region(r).contains(x)) return r;
  return std::nullopt;
}

RegionPartition make_partition(double m1, double m2, const TaskBounds& bounds) {
  const double lo = bounds.tau_min();
  const double hi = bounds.tau_max();
  m1 = std::min(m1, hi);
  m2 = std::min(std::max(m2, m1), hi);

  RegionPartition p{m1, m2, bounds, {}, {}, {}};
  const bool m1_top = m1 >= hi;
  const bool m2_top = m2 >= hi;

  if (!bounds.symmetric()) {
    p.easy.add({lo, m1, true, m1_top});
    if (!m1_top) p.middle.add({m1, m2, true, m2_top});
    if (!m2_top) p.difficult.add({m2, hi, true, true});
    return p;
  }

  // Mirrored regions. The point -m1 belongs to the negative middle lobe, so the
  // easy region is open at both ends and the split is symmetric under negation.
  if (m1_top) {
    p.easy.add({lo, hi, true, true});
    return p;
  }
  p.easy.add({-m1, m1, false, false});
  if (m1 == 0.0) {
    p.middle.add({-m2, 0.0, m2_top, false});
  } else {
    p.middle.add({-m2, -m1, m2_top, true});
  }
  p.middle.add({m1, m2, true, m2_top});
  if (!m2_top) {
    p.difficult.add({lo, -m2, true, true});
    p.difficult.add({m2, hi, true, true});
  }
  return p;
}

RegionPartition whole_range_partition(const TaskBounds& bounds) {
  return make_partition(bounds.tau_max(), bounds.tau_max(), bounds);
}

Schedule make_schedule(int n_epoch, int n_interval, const TaskBounds& bounds, double tau_mean) {
  if (n_epoch < 1) throw InputError("n_epoch must be positive");
  if (n_interval < 1) throw InputError("n_interval must be positive");
  Schedule s;
  s.n_epoch = n_epoch;
  s.n_interval = n_interval;
  s.half_epoch = n_epoch / 2;
  s.n_batch_epochs = std::max(1, s.half_epoch / n_interval);
  const double start = bounds.symmetric() ? std::abs(tau_mean) : tau_mean;
  s.d_tau = (bounds.tau_max() - start) / n_interval;
  return s;
}

double estimate_tau_mean(std::span<const ScoredTask> scores, DifficultyCoordinate coord) {
  if (scores.empty()) throw StateError("estimate_tau_mean needs epoch-0 scores");
  double total = 0.0;
  for (const auto& s : scores) total += s.score;
  const double mean = total / static_cast<double>(scores.size());

  double best_tau = 0.0;
  double best_gap = std::numeric_limits<double>::infinity();
  bool found = false;
  for (const auto& s : scores) {
    const double tau = difficulty(coord, s.task);
    const double gap = std::abs(s.score - mean);
    const bool closer = gap < best_gap;
    const bool tie_smaller =
        gap == best_gap && (std::abs(tau) < std::abs(best_tau) ||
                            (std::abs(tau) == std::abs(best_tau) && tau < best_tau));
    if (!found || closer || tie_smaller) {
      best_tau = tau;
      best_gap = gap;
      found = true;
    }
  }
  return best_tau;
}

RegionPartition initial_partition(double tau_mean, const Schedule& schedule,
                                  const TaskBounds& bounds) {
  if (!(tau_mean >= bounds.tau_min() && tau_mean <= bounds.tau_max()))
    throw InputError("tau_mean lies outside the task bounds");
  const double m1 = bounds.symmetric() ? std::abs(tau_mean) : tau_mean;
  const double changes = 0.5 * schedule.n_epoch / schedule.n_batch_epochs;
  const double m2 = m1 + 0.5 * changes * (0.5 * schedule.d_tau);
  return make_partition(m1, m2, bounds);
}

bool is_change_epoch(const Schedule& schedule, int epoch) {
  if (epoch < schedule.half_epoch) return false;
  const int offset = epoch - schedule.half_epoch;
  if (offset % schedule.n_batch_epochs != 0) return false;
  return offset / schedule.n_batch_epochs < schedule.n_interval;
}

RegionPartition advance(const RegionPartition& partition, const Schedule& schedule, int epoch) {
  if (!is_change_epoch(schedule, epoch)) return partition;
  const double hi = partition.bounds.tau_max();
  const double m1 = std::min(partition.tau_middle2, hi);
  const double m2 = std::min(partition.tau_middle2 + schedule.d_tau, hi);
  return make_partition(m1, m2, partition.bounds);
}

}  // namespace gts
