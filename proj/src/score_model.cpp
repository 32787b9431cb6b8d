#include "gts/score_model.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_interp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gts/error.hpp"

namespace gts {

namespace {

// Guards the floor() in bin lookup against values like 0.3 / 0.1 = 2.9999999999999996.
constexpr double kBinSlack = 1e-9;

}  // namespace

double mean_total_reward(std::span<const double> rollout_returns) {
  if (rollout_returns.empty()) throw InputError("mean_total_reward needs at least one rollout");
  const double total = std::accumulate(rollout_returns.begin(), rollout_returns.end(), 0.0);
  return total / static_cast<double>(rollout_returns.size());
}

ScoreTable::ScoreTable(TaskBounds bounds, double d_tau_bin)
    : bounds_(bounds), d_tau_bin_(d_tau_bin), bin_count_(1) {
  if (!(d_tau_bin > 0.0) || !std::isfinite(d_tau_bin))
    throw InputError("d_tau_bin must be positive");
  bin_count_ = std::max(1, static_cast<int>(std::ceil(bounds.span() / d_tau_bin - kBinSlack)));
}

void ScoreTable::add(ScoreRecord record) {
  if (!std::isfinite(record.r_mean)) throw InputError("score must be finite");
  if (record.epoch < 0) throw InputError("score epoch must be non-negative");
  if (!records_.empty() && record.epoch < records_.back().epoch)
    throw InputError("score records must arrive in epoch order");
  current_epoch_ = std::max(current_epoch_, record.epoch);
  records_.push_back(std::move(record));
}

int ScoreTable::bin_index(double coordinate) const {
  const double raw = std::floor((coordinate - bounds_.tau_min()) / d_tau_bin_ + kBinSlack);
  return std::clamp(static_cast<int>(raw), 0, bin_count_ - 1);
}

double ScoreTable::bin_start(int k) const { return bounds_.tau_min() + k * d_tau_bin_; }

double ScoreTable::bin_center(int k) const {
  const double lo = bin_start(k);
  const double hi = std::min(lo + d_tau_bin_, bounds_.tau_max());
  return 0.5 * (lo + hi);
}

std::optional<double> weighted_bin_score(const ScoreTable& table, double bin_start) {
  const int k = table.bin_index(bin_start);
  double weighted = 0.0;
  int n_bin = 0;
  for (const auto& r : table.records()) {
    if (table.bin_index(r.coordinate) != k) continue;
    weighted += static_cast<double>(r.epoch) * r.r_mean;
    ++n_bin;
  }
  if (n_bin == 0) return std::nullopt;
  return weighted / n_bin;
}

struct CubicSpline::Impl {
  gsl_interp* interp = nullptr;
  ~Impl() {
    if (interp) gsl_interp_free(interp);
  }
};

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)), impl_(std::make_unique<Impl>()) {
  if (x_.size() != y_.size()) throw InputError("spline knots need matching x and y");
  if (x_.size() < 2) throw InputError("spline needs at least two knots");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw InputError("spline knots must be strictly increasing");
  if (x_.size() >= 3) {
    impl_->interp = gsl_interp_alloc(gsl_interp_cspline, x_.size());
    if (gsl_interp_init(impl_->interp, x_.data(), y_.data(), x_.size()) != GSL_SUCCESS)
      throw RunError("spline initialization failed");
  }
}

CubicSpline::~CubicSpline() = default;
CubicSpline::CubicSpline(CubicSpline&&) noexcept = default;
CubicSpline& CubicSpline::operator=(CubicSpline&&) noexcept = default;

double CubicSpline::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  if (!impl_->interp) {
    const double t = (x - x_[0]) / (x_[1] - x_[0]);
    return y_[0] + t * (y_[1] - y_[0]);
  }
  return gsl_interp_eval(impl_->interp, x_.data(), y_.data(), x, nullptr);
}

std::vector<double> min_max_normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.5);
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / (hi - lo);
  return out;
}

ScoreCurve build_curve(const ScoreTable& table) {
  const int bins = table.bin_count();
  std::vector<double> sums(bins, 0.0);
  std::vector<int> counts(bins, 0);
  for (const auto& r : table.records()) {
    const int k = table.bin_index(r.coordinate);
    sums[k] += static_cast<double>(r.epoch) * r.r_mean;
    ++counts[k];
  }

  ScoreCurve curve;
  curve.bin_width = table.d_tau_bin();
  for (int k = 0; k < bins; ++k) {
    curve.centers.push_back(table.bin_center(k));
    if (counts[k] == 0) continue;
    curve.knot_x.push_back(table.bin_center(k));
    curve.knot_y.push_back(sums[k] / counts[k]);
  }
  if (curve.knot_x.size() < 2)
    throw StateError("score curve needs at least two populated bins");

  curve.interpolant = std::make_shared<CubicSpline>(curve.knot_x, curve.knot_y);
  const auto [lo_it, hi_it] = std::minmax_element(curve.knot_y.begin(), curve.knot_y.end());
  curve.values.reserve(curve.centers.size());
  for (double c : curve.centers)
    curve.values.push_back(std::clamp((*curve.interpolant)(c), *lo_it, *hi_it));
  curve.normalized = min_max_normalize(curve.values);
  return curve;
}

BinDistribution BinDistribution::uniform(std::vector<double> centers, double bin_width) {
  BinDistribution d;
  d.probs.assign(centers.size(), centers.empty() ? 0.0 : 1.0 / centers.size());
  d.centers = std::move(centers);
  d.bin_width = bin_width;
  return d;
}

BinDistribution probability(std::span<const double> centers, std::span<const double> normalized,
                            double bin_width) {
  if (centers.size() != normalized.size())
    throw InputError("probability needs one normalized score per bin");
  std::vector<double> weights(normalized.size());
  double total = 0.0;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    if (normalized[i] < 0.0 || normalized[i] > 1.0)
      throw InputError("normalized scores must lie in [0,1]");
    weights[i] = 1.0 - normalized[i];
    total += weights[i];
  }
  std::vector<double> c(centers.begin(), centers.end());
  if (!(total > 0.0)) return BinDistribution::uniform(std::move(c), bin_width);
  BinDistribution d;
  d.centers = std::move(c);
  d.bin_width = bin_width;
  d.probs.reserve(weights.size());
  for (double w : weights) d.probs.push_back(w / total);
  return d;
}

BinDistribution probability(const ScoreCurve& curve) {
  return probability(curve.centers, curve.normalized, curve.bin_width);
}

}  // namespace gts
