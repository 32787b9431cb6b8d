#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gts/error.hpp"
#include "gts/task_space.hpp"

using namespace gts;

TEST_CASE("contains uses closed bounds") {
  const TaskBounds b(0.0, 3.0);
  CHECK(contains(b, TaskParam(1.5)));
  CHECK(contains(b, TaskParam(3.0)));
  CHECK(contains(b, TaskParam(0.0)));
  CHECK_FALSE(contains(b, TaskParam(3.05)));
  CHECK_FALSE(contains(b, TaskParam(-0.01)));
}

TEST_CASE("bounds validation") {
  CHECK_THROWS_AS(TaskBounds(3.0, 3.0), InputError);
  CHECK_THROWS_AS(TaskBounds(2.0, 1.0), InputError);
  CHECK_THROWS_AS(TaskBounds(-1.0, 3.0), InputError);
  CHECK(TaskBounds(-2.0, 2.0).symmetric());
  CHECK_FALSE(TaskBounds(0.0, 2.0).symmetric());
}

TEST_CASE("task params must be finite") {
  CHECK_THROWS_AS(TaskParam(std::numeric_limits<double>::quiet_NaN()), InputError);
  CHECK_THROWS_AS(TaskParam(1.0, std::numeric_limits<double>::infinity()), InputError);
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(TaskParam::from_values(three), InputError);
  const std::vector<double> two{3, 4};
  CHECK(TaskParam::from_values(two) == TaskParam(3.0, 4.0));
}

TEST_CASE("difficulty coordinate") {
  CHECK(difficulty(DifficultyCoordinate::identity, TaskParam(2.0)) == 2.0);
  CHECK(difficulty(DifficultyCoordinate::radial, TaskParam(3.0, 4.0)) == 5.0);
  CHECK(difficulty(DifficultyCoordinate::radial, TaskParam(0.0, 0.0)) == 0.0);
  CHECK_THROWS_AS(difficulty(DifficultyCoordinate::identity, TaskParam(1.0, 1.0)), InputError);
}

TEST_CASE("radial lift round-trips the radius") {
  Rng rng(3);
  for (double r : {0.0, 0.5, 1.7, 3.0}) {
    const TaskParam t = lift(DifficultyCoordinate::radial, r, rng);
    CHECK(t.dim() == 2);
    CHECK(difficulty(DifficultyCoordinate::radial, t) == doctest::Approx(r).epsilon(1e-12));
  }
  const TaskParam a = lift_at_angle(DifficultyCoordinate::radial, 2.0, M_PI / 2);
  CHECK(a[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(2.0));
  CHECK(lift(DifficultyCoordinate::identity, 1.25, rng) == TaskParam(1.25));
}

TEST_CASE("2D tasks are checked by radius") {
  const TaskSpace space{TaskBounds(0.0, 2.0), DifficultyCoordinate::radial, 2};
  CHECK(contains(space, TaskParam(1.0, 1.0)));
  CHECK_FALSE(contains(space, TaskParam(2.0, 1.0)));
  CHECK_THROWS_AS(contains(space.bounds, TaskParam(1.0, 1.0)), InputError);
}
