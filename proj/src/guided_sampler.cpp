#include "gts/guided_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "gts/error.hpp"

namespace gts {

const char* to_string(TaskLabel label) {
  switch (label) {
    case TaskLabel::easy: return "easy";
    case TaskLabel::middle: return "middle";
    case TaskLabel::grid: return "grid";
    case TaskLabel::uniform: return "uniform";
  }
  return "?";
}

TaskLabel task_label_from_string(const std::string& text) {
  for (auto l : {TaskLabel::easy, TaskLabel::middle, TaskLabel::grid, TaskLabel::uniform})
    if (text == to_string(l)) return l;
  throw InputError("unknown region label '" + text + "'");
}

void SamplerConfig::validate() const {
  if (n_batch < 2) throw InputError("n_batch must be at least 2");
  if (!(delta >= 0.0 && delta <= 1.0)) throw InputError("delta must lie in [0,1]");
  if (!(d_tau_bin > 0.0)) throw InputError("d_tau_bin must be positive");
}

double sample_in(const IntervalSet& set, Rng& rng) {
  if (set.empty()) throw StateError("cannot sample from an empty region");
  const double total = set.length();
  const auto& pieces = set.pieces();
  if (!(total > 0.0)) return pieces.front().clamp(pieces.front().lo);
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (const auto& p : pieces) {
    if (u < p.length() || &p == &pieces.back()) return p.clamp(p.lo + std::min(u, p.length()));
    u -= p.length();
  }
  return pieces.back().clamp(pieces.back().hi);
}

namespace {

// Distribution restricted to the bins whose centers fall inside one region
// piece set; empty or massless restrictions fall back to uniform draws.
class RestrictedDraw {
 public:
  RestrictedDraw(const BinDistribution& dist, IntervalSet region) : region_(std::move(region)) {
    double total = 0.0;
    for (std::size_t i = 0; i < dist.centers.size(); ++i) {
      if (!region_.contains(dist.centers[i])) continue;
      total += dist.probs[i];
      centers_.push_back(dist.centers[i]);
      cumulative_.push_back(total);
    }
    total_ = total;
    half_width_ = 0.5 * dist.bin_width;
  }

  double draw(Rng& rng) const {
    if (!(total_ > 0.0)) return sample_in(region_, rng);
    const double u = std::uniform_real_distribution<double>(0.0, total_)(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    const double center = centers_[static_cast<std::size_t>(it - cumulative_.begin())];
    const double jitter = std::uniform_real_distribution<double>(-half_width_, half_width_)(rng);
    return clamp_into_region(center, center + jitter);
  }

  double draw_uniform(Rng& rng) const { return sample_in(region_, rng); }

 private:
  double clamp_into_region(double center, double x) const {
    for (const auto& p : region_.pieces())
      if (p.contains(center)) return p.clamp(x);
    return region_.pieces().front().clamp(x);
  }

  IntervalSet region_;
  std::vector<double> centers_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
  double half_width_ = 0.0;
};

struct Split {
  int easy = 0;
  int middle = 0;
};

Split split_batch(const RegionPartition& p, int n) {
  if (p.middle.empty()) return {n, 0};
  if (p.easy.empty()) return {0, n};
  const int easy = (n + 1) / 2;
  return {easy, n - easy};
}

// Positive and negative middle lobes of a symmetric partition.
std::pair<IntervalSet, IntervalSet> middle_lobes(const RegionPartition& p) {
  IntervalSet neg;
  IntervalSet pos;
  for (const auto& piece : p.middle.pieces()) {
    if (piece.hi <= 0.0 && !(piece.lo == 0.0)) neg.add(piece);
    else pos.add(piece);
  }
  return {neg, pos};
}

template <typename DrawMiddle>
void fill_middle(SamplingPlan& plan, const RegionPartition& p, int count,
                 DifficultyCoordinate coord, Rng& rng, DrawMiddle&& draw) {
  auto push = [&](double x) {
    plan.tasks.push_back({lift(coord, x, rng), x, TaskLabel::middle});
  };
  if (!p.bounds.symmetric()) {
    for (int i = 0; i < count; ++i) push(draw(p.middle, rng));
    return;
  }
  auto [neg, pos] = middle_lobes(p);
  if (neg.empty() || pos.empty()) {
    for (int i = 0; i < count; ++i) push(draw(p.middle, rng));
    return;
  }
  const int n_neg = count / 2;
  for (int i = 0; i < count - n_neg; ++i) push(draw(pos, rng));
  for (int i = 0; i < n_neg; ++i) push(draw(neg, rng));
}

}  // namespace

SamplingPlan epoch0_grid(const TaskSpace& space, int n_batch, Rng& rng) {
  if (n_batch < 2) throw InputError("epoch-0 grid needs at least two tasks");
  SamplingPlan plan;
  const double lo = space.bounds.tau_min();
  const double hi = space.bounds.tau_max();
  for (int i = 0; i < n_batch; ++i) {
    const double x = i == n_batch - 1 ? hi : lo + (hi - lo) * i / (n_batch - 1);
    plan.tasks.push_back({lift(space.coord, x, rng), x, TaskLabel::grid});
  }
  return plan;
}

SamplingPlan epoch0_grid(const TaskBounds& bounds, int n_batch) {
  Rng unused(0);
  return epoch0_grid(TaskSpace{bounds, DifficultyCoordinate::identity, 1}, n_batch, unused);
}

SamplingPlan sample_batch(const RegionPartition& partition, const BinDistribution& dist,
                          const SamplerConfig& config, DifficultyCoordinate coord, Rng& rng) {
  config.validate();
  if (dist.centers.size() != dist.probs.size()) throw InputError("malformed bin distribution");
  const Split split = split_batch(partition, config.n_batch);
  SamplingPlan plan;

  const RestrictedDraw easy(dist, partition.easy);
  std::bernoulli_distribution mix(config.delta);
  for (int i = 0; i < split.easy; ++i) {
    const double x = mix(rng) ? easy.draw_uniform(rng) : easy.draw(rng);
    plan.tasks.push_back({lift(coord, x, rng), x, TaskLabel::easy});
  }
  fill_middle(plan, partition, split.middle, coord, rng,
              [&](const IntervalSet& region, Rng& r) { return RestrictedDraw(dist, region).draw(r); });
  return plan;
}

SamplingPlan sample_regions_uniform(const RegionPartition& partition, const SamplerConfig& config,
                                    DifficultyCoordinate coord, Rng& rng) {
  config.validate();
  const Split split = split_batch(partition, config.n_batch);
  SamplingPlan plan;
  for (int i = 0; i < split.easy; ++i) {
    const double x = sample_in(partition.easy, rng);
    plan.tasks.push_back({lift(coord, x, rng), x, TaskLabel::easy});
  }
  fill_middle(plan, partition, split.middle, coord, rng,
              [](const IntervalSet& region, Rng& r) { return sample_in(region, r); });
  return plan;
}

SamplingPlan sample_uniform(const TaskBounds& bounds, int n, DifficultyCoordinate coord, Rng& rng) {
  if (n < 1) throw InputError("batch must contain at least one task");
  SamplingPlan plan;
  std::uniform_real_distribution<double> u(bounds.tau_min(), bounds.tau_max());
  for (int i = 0; i < n; ++i) {
    const double x = u(rng);
    plan.tasks.push_back({lift(coord, x, rng), x, TaskLabel::uniform});
  }
  return plan;
}

}  // namespace gts
