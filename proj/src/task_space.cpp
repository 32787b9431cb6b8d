#include "gts/task_space.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gts/error.hpp"

namespace gts {

namespace {

void require_finite(double v) {
  if (!std::isfinite(v)) throw InputError("task parameter must be finite");
}

}  // namespace

TaskParam::TaskParam(double v) : values_{v, 0.0}, dim_(1) { require_finite(v); }

TaskParam::TaskParam(double x, double y) : values_{x, y}, dim_(2) {
  require_finite(x);
  require_finite(y);
}

TaskParam TaskParam::from_values(std::span<const double> values) {
  if (values.size() == 1) return TaskParam(values[0]);
  if (values.size() == 2) return TaskParam(values[0], values[1]);
  throw InputError("task parameter must have dimension 1 or 2, got " +
                   std::to_string(values.size()));
}

std::string TaskParam::to_string() const {
  std::ostringstream os;
  os << '(' << values_[0];
  if (dim_ == 2) os << ", " << values_[1];
  os << ')';
  return os.str();
}

TaskBounds::TaskBounds(double tau_min, double tau_max)
    : tau_min_(tau_min), tau_max_(tau_max), symmetric_(tau_min < 0.0) {
  if (!std::isfinite(tau_min) || !std::isfinite(tau_max))
    throw InputError("task bounds must be finite");
  if (!(tau_min < tau_max)) throw InputError("task bounds require tau_min < tau_max");
  if (symmetric_ && tau_min != -tau_max)
    throw InputError("negative tau_min is only supported for symmetric bounds (tau_min = -tau_max)");
}

double difficulty(DifficultyCoordinate coord, const TaskParam& tau) {
  switch (coord) {
    case DifficultyCoordinate::identity:
      if (tau.dim() != 1) throw InputError("identity difficulty needs a 1D task");
      return tau[0];
    case DifficultyCoordinate::radial:
      return tau.dim() == 1 ? std::abs(tau[0]) : std::hypot(tau[0], tau[1]);
  }
  return 0.0;
}

TaskParam lift_at_angle(DifficultyCoordinate coord, double value, double angle) {
  if (coord == DifficultyCoordinate::identity) return TaskParam(value);
  return TaskParam(value * std::cos(angle), value * std::sin(angle));
}

TaskParam lift(DifficultyCoordinate coord, double value, Rng& rng) {
  if (coord == DifficultyCoordinate::identity) return TaskParam(value);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  return lift_at_angle(coord, value, angle(rng));
}

bool contains(const TaskBounds& bounds, const TaskParam& tau) {
  if (tau.dim() != 1) throw InputError("dimension mismatch: bounds are 1D");
  return tau[0] >= bounds.tau_min() && tau[0] <= bounds.tau_max();
}

bool contains(const TaskSpace& space, const TaskParam& tau) {
  if (tau.dim() != space.dim)
    throw InputError("dimension mismatch: expected " + std::to_string(space.dim) + "D task, got " +
                     std::to_string(tau.dim()) + "D");
  const double d = difficulty(space.coord, tau);
  return d >= space.bounds.tau_min() && d <= space.bounds.tau_max();
}

}  // namespace gts
