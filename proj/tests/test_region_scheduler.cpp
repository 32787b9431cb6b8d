#include <doctest.h>

#include <vector>

#include "gts/error.hpp"
#include "gts/invariants.hpp"
#include "gts/region_scheduler.hpp"

using namespace gts;

namespace {

std::vector<ScoredTask> scored(std::initializer_list<std::pair<double, double>> xs) {
  std::vector<ScoredTask> out;
  for (auto [t, s] : xs) out.push_back({TaskParam(t), s});
  return out;
}

}  // namespace

TEST_CASE("tau_mean picks the task nearest the mean score") {
  CHECK(estimate_tau_mean(scored({{0, 10}, {1.5, 6}, {3, 2}})) == 1.5);
  CHECK(estimate_tau_mean(scored({{0, 10}, {3, 10}})) == 0.0);
  // mean 30; nearest score is 10 (distance 20) versus 60 (distance 30)
  CHECK(estimate_tau_mean(scored({{0, 90}, {1, 60}, {2, 10}, {3, -40}})) == 2.0);
  CHECK_THROWS_AS(estimate_tau_mean(std::vector<ScoredTask>{}), StateError);
}

TEST_CASE("schedule constants") {
  const TaskBounds b(0.0, 3.0);
  const Schedule s = make_schedule(200, 10, b, 1.0);
  CHECK(s.n_batch_epochs == 10);
  CHECK(s.half_epoch == 100);
  CHECK(s.d_tau == doctest::Approx(0.2));
  CHECK(make_schedule(4, 10, b, 1.0).n_batch_epochs == 1);
}

TEST_CASE("initial partition and first change") {
  const TaskBounds b(0.0, 3.0);
  const Schedule s = make_schedule(200, 10, b, 1.0);
  const RegionPartition p = initial_partition(1.0, s, b);
  CHECK(p.tau_middle1 == 1.0);
  CHECK(p.tau_middle2 == doctest::Approx(1.5));
  CHECK(p.region_of(0.99) == Region::easy);
  CHECK(p.region_of(1.0) == Region::middle);
  CHECK(p.region_of(1.5) == Region::difficult);
  CHECK(p.region_of(3.0) == Region::difficult);
  CHECK_FALSE(p.region_of(3.01).has_value());

  CHECK(advance(p, s, 10) == p);
  CHECK_FALSE(is_change_epoch(s, 99));
  CHECK(is_change_epoch(s, 100));
  const RegionPartition q = advance(p, s, 100);
  CHECK(q.tau_middle1 == doctest::Approx(1.5));
  CHECK(q.tau_middle2 == doctest::Approx(1.7));
  CHECK(advance(q, s, 105) == q);
}

TEST_CASE("tau_mean at the top leaves only the easy region") {
  const TaskBounds b(0.0, 3.0);
  const Schedule s = make_schedule(200, 10, b, 3.0);
  const RegionPartition p = initial_partition(3.0, s, b);
  CHECK(p.tau_middle1 == 3.0);
  CHECK(p.tau_middle2 == 3.0);
  CHECK(p.middle.empty());
  CHECK(p.difficult.empty());
  CHECK(p.easy.contains(3.0));
  CHECK_THROWS_AS(initial_partition(3.5, s, b), InputError);
}

TEST_CASE("schedule end state covers the range") {
  const TaskBounds b(0.0, 3.0);
  const Schedule s = make_schedule(200, 10, b, 1.5);
  RegionPartition p = initial_partition(1.5, s, b);
  CHECK(p.tau_middle2 == doctest::Approx(1.875));
  int changes = 0;
  for (int e = 1; e < 200; ++e) {
    if (is_change_epoch(s, e)) ++changes;
    p = advance(p, s, e);
  }
  CHECK(changes == 10);
  CHECK(p.tau_middle2 == 3.0);
  CHECK(p.easy.length() + p.middle.length() == doctest::Approx(3.0));
  for (double x = 0.0; x <= 3.0; x += 0.01) {
    const auto r = p.region_of(x);
    CHECK((r == Region::easy || r == Region::middle));
  }
  CHECK(p.region_of(3.0).has_value());
  CHECK(p.region_of(3.0) != Region::difficult);
}

TEST_CASE("symmetric partition is disjoint and mirrored") {
  const TaskBounds b(-3.0, 3.0);
  const RegionPartition p = make_partition(1.0, 1.5, b);
  CHECK(p.region_of(0.0) == Region::easy);
  CHECK(p.region_of(0.999) == Region::easy);
  CHECK(p.region_of(-0.999) == Region::easy);
  CHECK(p.region_of(1.0) == Region::middle);
  CHECK(p.region_of(-1.0) == Region::middle);
  CHECK(p.region_of(1.49) == Region::middle);
  CHECK(p.region_of(-1.49) == Region::middle);
  CHECK(p.region_of(1.5) == Region::difficult);
  CHECK(p.region_of(-1.5) == Region::difficult);
  CHECK(p.region_of(-3.0) == Region::difficult);
  CHECK(p.middle.pieces().size() == 2);
  CHECK(p.difficult.pieces().size() == 2);
  CHECK(p.easy.length() + p.middle.length() + p.difficult.length() == doctest::Approx(6.0));
}

TEST_CASE("symmetric bounds use |tau_mean|") {
  const TaskBounds b(-3.0, 3.0);
  const Schedule s = make_schedule(200, 10, b, -1.0);
  CHECK(s.d_tau == doctest::Approx(0.2));
  const RegionPartition p = initial_partition(-1.0, s, b);
  CHECK(p.tau_middle1 == 1.0);
}

TEST_CASE("region schedule matches the hand iteration") {
  const CheckResult r = check_region_schedule(50);
  INFO(r.detail);
  CHECK(r.passed);
}
