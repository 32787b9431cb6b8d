#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gts/error.hpp"
#include "gts/guided_sampler.hpp"
#include "gts/invariants.hpp"

using namespace gts;

namespace {

std::vector<double> coords(const SamplingPlan& p) {
  std::vector<double> out;
  for (const auto& t : p.tasks) out.push_back(t.coordinate);
  return out;
}

BinDistribution uniform_bins(double lo, double hi, double w) {
  std::vector<double> c;
  for (double x = lo + 0.5 * w; x < hi; x += w) c.push_back(x);
  return BinDistribution::uniform(c, w);
}

}  // namespace

TEST_CASE("epoch-0 grid") {
  CHECK(coords(epoch0_grid(TaskBounds(0, 3), 4)) == std::vector<double>{0, 1, 2, 3});
  CHECK(coords(epoch0_grid(TaskBounds(0, 3), 2)) == std::vector<double>{0, 3});
  CHECK(coords(epoch0_grid(TaskBounds(-2, 2), 5)) == std::vector<double>{-2, -1, 0, 1, 2});
  for (const auto& t : epoch0_grid(TaskBounds(0, 3), 4).tasks) CHECK(t.label == TaskLabel::grid);
  CHECK_THROWS_AS(epoch0_grid(TaskBounds(0, 3), 1), InputError);
}

TEST_CASE("batch split and region membership") {
  const TaskBounds b(0, 3);
  const RegionPartition p = make_partition(1.0, 1.5, b);
  const BinDistribution d = uniform_bins(0, 3, 0.1);
  Rng rng(5);
  for (int n : {40, 41, 2}) {
    SamplerConfig cfg;
    cfg.n_batch = n;
    const SamplingPlan plan = sample_batch(p, d, cfg, DifficultyCoordinate::identity, rng);
    CHECK(plan.tasks.size() == static_cast<std::size_t>(n));
    const auto easy = std::count_if(plan.tasks.begin(), plan.tasks.end(),
                                    [](const PlannedTask& t) { return t.label == TaskLabel::easy; });
    CHECK(easy == (n + 1) / 2);
    for (const auto& t : plan.tasks) {
      const auto r = p.region_of(t.coordinate);
      CHECK(r == (t.label == TaskLabel::easy ? Region::easy : Region::middle));
    }
  }
}

TEST_CASE("empty middle puts the whole batch in easy") {
  const TaskBounds b(0, 3);
  const RegionPartition p = make_partition(3.0, 3.0, b);
  Rng rng(1);
  SamplerConfig cfg;
  const SamplingPlan plan = sample_batch(p, uniform_bins(0, 3, 0.1), cfg, DifficultyCoordinate::identity, rng);
  for (const auto& t : plan.tasks) CHECK(t.label == TaskLabel::easy);
  CHECK(plan.tasks.size() == 40);
}

TEST_CASE("point-mass distribution stays within half a bin") {
  const TaskBounds b(0, 3);
  const RegionPartition p = make_partition(1.0, 2.0, b);
  BinDistribution d = uniform_bins(0, 3, 0.1);
  std::fill(d.probs.begin(), d.probs.end(), 0.0);
  d.probs[15] = 1.0;  // centre 1.55
  SamplerConfig cfg;
  cfg.delta = 0.0;
  Rng rng(9);
  for (int rep = 0; rep < 50; ++rep)
    for (const auto& t : sample_batch(p, d, cfg, DifficultyCoordinate::identity, rng).tasks)
      if (t.label == TaskLabel::middle) CHECK(std::abs(t.coordinate - 1.55) <= 0.05 + 1e-12);
}

TEST_CASE("delta 1 draws the easy half uniformly") {
  const TaskBounds b(0, 3);
  const RegionPartition p = make_partition(2.0, 2.5, b);
  BinDistribution d = uniform_bins(0, 3, 0.1);
  std::fill(d.probs.begin(), d.probs.end(), 0.0);
  d.probs[0] = 1.0;
  SamplerConfig cfg;
  cfg.delta = 1.0;
  cfg.n_batch = 200;
  Rng rng(4);
  int above_one = 0, easy = 0;
  for (int rep = 0; rep < 50; ++rep)
    for (const auto& t : sample_batch(p, d, cfg, DifficultyCoordinate::identity, rng).tasks)
      if (t.label == TaskLabel::easy) {
        ++easy;
        above_one += t.coordinate >= 1.0;
      }
  CHECK(static_cast<double>(above_one) / easy == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("symmetric middle draws split evenly") {
  const TaskBounds b(-3, 3);
  const RegionPartition p = make_partition(1.0, 1.5, b);
  SamplerConfig cfg;
  cfg.n_batch = 20;
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    int pos = 0, neg = 0;
    for (const auto& t : sample_batch(p, uniform_bins(-3, 3, 0.1), cfg, DifficultyCoordinate::identity, rng).tasks) {
      if (t.label != TaskLabel::middle) continue;
      (t.coordinate > 0 ? pos : neg) += 1;
      CHECK(p.region_of(t.coordinate) == Region::middle);
    }
    CHECK(pos == 5);
    CHECK(neg == 5);
  }
}

TEST_CASE("radial batches carry 2D tasks with the drawn radius") {
  const TaskBounds b(0, 2);
  const RegionPartition p = make_partition(0.5, 1.0, b);
  Rng rng(8);
  SamplerConfig cfg;
  cfg.n_batch = 20;
  for (const auto& t : sample_regions_uniform(p, cfg, DifficultyCoordinate::radial, rng).tasks) {
    CHECK(t.task.dim() == 2);
    CHECK(difficulty(DifficultyCoordinate::radial, t.task) == doctest::Approx(t.coordinate));
  }
}

TEST_CASE("uniform baseline covers the bounds") {
  Rng rng(12);
  std::vector<int> hist(10, 0);
  const int n = 20000;
  for (const auto& t : sample_uniform(TaskBounds(0, 3), n, DifficultyCoordinate::identity, rng).tasks) {
    CHECK(t.label == TaskLabel::uniform);
    hist[static_cast<std::size_t>(std::min(9, static_cast<int>(t.coordinate / 0.3)))] += 1;
  }
  double chi2 = 0;
  for (int h : hist) chi2 += (h - n / 10.0) * (h - n / 10.0) / (n / 10.0);
  CHECK(chi2 < 27.88);  // 99.9% quantile, 9 dof
}

TEST_CASE("sampler fidelity over 1e5 draws") {
  const CheckResult r = check_sampler_fidelity(100000);
  INFO(r.detail);
  CHECK(r.passed);
}
