#include "gts/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gts/error.hpp"

namespace gts {

void SweepResult::validate() const {
  if (!(step > 0.0)) throw InputError("sweep step must be positive");
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (!(entries[i].coordinate > entries[i - 1].coordinate))
      throw InputError("sweep tasks must be strictly increasing in difficulty");
}

namespace {

const SweepEntry& nearest_entry(const SweepResult& sweep, double tau) {
  if (sweep.entries.empty()) throw InputError("empty sweep");
  const SweepEntry* best = &sweep.entries.front();
  for (const auto& e : sweep.entries)
    if (std::abs(e.coordinate - tau) < std::abs(best->coordinate - tau)) best = &e;
  if (std::abs(best->coordinate - tau) > 0.5 * sweep.step + 1e-12)
    throw InputError("tau " + std::to_string(tau) + " is not on the sweep grid");
  return *best;
}

double max_post(const SweepResult& sweep) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& e : sweep.entries) best = std::max(best, e.post);
  return best;
}

}  // namespace

double bias_score(const SweepResult& sweep, double tau) {
  const SweepEntry& e = nearest_entry(sweep, tau);
  return e.post - max_post(sweep);
}

RobustnessSummary summarize(const SweepResult& sweep, std::span<const TauRange> ranges,
                            std::span<const double> bias_points) {
  if (sweep.entries.empty()) throw InputError("empty sweep");
  sweep.validate();
  RobustnessSummary s;
  s.highest_score = -std::numeric_limits<double>::infinity();
  for (const auto& e : sweep.entries) {
    if (e.post > s.highest_score) {
      s.highest_score = e.post;
      s.tau_at_highest = e.coordinate;
    }
    if (!s.min_negative_tau && e.post < 0.0) s.min_negative_tau = e.coordinate;
  }

  const double slack = 0.5 * sweep.step + 1e-12;
  const double first = sweep.entries.front().coordinate;
  const double last = sweep.entries.back().coordinate;
  for (const auto& r : ranges) {
    if (!(r.lo <= r.hi) || r.lo < first - slack || r.hi > last + slack)
      throw InputError("range [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) +
                       "] is outside the sweep");
    RangeStat stat{r.lo, r.hi};
    double total = 0.0;
    for (const auto& e : sweep.entries)
      if (e.coordinate >= r.lo - 1e-9 && e.coordinate <= r.hi + 1e-9) {
        total += e.post;
        ++stat.count;
      }
    if (stat.count == 0) throw InputError("range contains no sweep points");
    stat.mean = total / stat.count;
    double sq = 0.0;
    for (const auto& e : sweep.entries)
      if (e.coordinate >= r.lo - 1e-9 && e.coordinate <= r.hi + 1e-9)
        sq += (e.post - stat.mean) * (e.post - stat.mean);
    stat.variance = sq / stat.count;
    s.ranges.push_back(stat);
  }
  for (double tau : bias_points) s.bias.push_back({tau, bias_score(sweep, tau)});
  return s;
}

std::string tau_key(double tau) {
  std::ostringstream os;
  os << std::abs(tau);
  std::string text = os.str();
  std::replace(text.begin(), text.end(), '.', '_');
  return (tau < 0.0 ? "m" : "") + text;
}

nlohmann::json RobustnessSummary::to_json(const std::string& symbol) const {
  nlohmann::json j = nlohmann::json::object();
  j["highest_score"] = highest_score;
  j[symbol + "_in_highest_score"] = tau_at_highest;
  for (const auto& r : ranges)
    j["mean_value_" + symbol + "_" + tau_key(r.lo) + "_" + tau_key(r.hi)] = r.mean;
  for (const auto& r : ranges)
    j["variance_value_" + symbol + "_" + tau_key(r.lo) + "_" + tau_key(r.hi)] = r.variance;
  for (const auto& b : bias) j["bias_score_at_" + symbol + "_" + tau_key(b.tau)] = b.bias;
  j["min_" + symbol + "_with_negative_reward"] =
      min_negative_tau ? nlohmann::json(*min_negative_tau) : nlohmann::json("none");
  return j;
}

std::vector<double> sweep_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw InputError("sweep step must be positive");
  if (!(hi >= lo)) throw InputError("sweep bounds are reversed");
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  std::vector<double> grid;
  for (long k = 0; k <= n; ++k) grid.push_back(k == n ? hi : lo + static_cast<double>(k) * step);
  if (grid.size() >= 2 && !(grid.back() > grid[grid.size() - 2])) grid.erase(grid.end() - 2);
  return grid;
}

SweepResult evaluate_sweep(const Eigen::VectorXd& theta, const TaskObjective& objective,
                           DifficultyCoordinate coord, const TaskBounds& test_bounds, double step,
                           const MetaConfig& config, std::uint64_t seed) {
  config.validate();
  const auto grid = sweep_grid(test_bounds.tau_min(), test_bounds.tau_max(), step);
  constexpr double golden_angle = std::numbers::pi * (3.0 - 2.23606797749978969640917);

  SweepResult sweep;
  sweep.step = step;
  sweep.entries.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), config.workers, [&](int k) {
    const double x = grid[static_cast<std::size_t>(k)];
    const TaskParam task = lift_at_angle(coord, x, golden_angle * k);
    const std::uint64_t stream = derive_seed(seed, {static_cast<std::uint64_t>(k)});
    Rng pre_rng(stream);
    const Adaptation a = adapt_with_estimate(theta, task, config, objective, pre_rng);
    Rng post_rng(stream);
    const TaskEstimate post = objective.estimate(a.adapted, task, post_rng);
    sweep.entries[static_cast<std::size_t>(k)] = {task, x, post.r_mean, a.pre.r_mean, {}};
  });
  return sweep;
}

SweepResult average_sweeps(std::span<const SweepResult> sweeps) {
  if (sweeps.empty()) throw InputError("no sweeps to average");
  SweepResult out;
  out.step = sweeps.front().step;
  out.entries = sweeps.front().entries;
  for (auto& e : out.entries) {
    e.post = 0.0;
    e.pre = 0.0;
    e.per_seed_post.clear();
  }
  for (const auto& s : sweeps) {
    if (s.entries.size() != out.entries.size())
      throw InputError("sweeps cover different grids");
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      if (std::abs(s.entries[i].coordinate - out.entries[i].coordinate) > 1e-9)
        throw InputError("sweeps cover different grids");
      out.entries[i].post += s.entries[i].post;
      out.entries[i].pre += s.entries[i].pre;
      out.entries[i].per_seed_post.push_back(s.entries[i].post);
    }
  }
  const double n = static_cast<double>(sweeps.size());
  for (auto& e : out.entries) {
    e.post /= n;
    e.pre /= n;
  }
  return out;
}

}  // namespace gts
