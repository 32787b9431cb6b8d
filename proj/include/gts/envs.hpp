#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "gts/policy.hpp"
#include "gts/rng.hpp"
#include "gts/task_space.hpp"

namespace gts {

enum class EnvKind { navigation2d, velocity1d };

const char* to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& text);

struct EnvSpec {
  EnvKind kind = EnvKind::velocity1d;
  int horizon = 100;
  double action_limit = 1.0;  // nav: 0.1 per axis; velocity: 1.0
  // Velocity surrogate dynamics.
  double dt = 0.05;
  double gain = 2.0;
  double drag = 0.5;
  double velocity_limit = 6.0;  // |v| beyond this ends the survival bonus
  // Navigation.
  double goal_tolerance = 0.01;

  static EnvSpec navigation();
  /// velocity_limit = 2 * max(|tau_max|, 1) for the training range.
  static EnvSpec velocity(double train_tau_max);

  int obs_dim() const { return kind == EnvKind::navigation2d ? 2 : 1; }
  int act_dim() const { return kind == EnvKind::navigation2d ? 2 : 1; }
  std::size_t task_dim() const { return kind == EnvKind::navigation2d ? 2 : 1; }
  DifficultyCoordinate coordinate() const {
    return kind == EnvKind::navigation2d ? DifficultyCoordinate::radial
                                         : DifficultyCoordinate::identity;
  }
  void validate() const;
};

struct NavState {
  double x = 0.0;
  double y = 0.0;
};

struct NavStep {
  NavState state;
  double reward = 0.0;
  bool terminal = false;
};

NavStep nav_step(const EnvSpec& spec, const NavState& state, std::array<double, 2> action,
                 const TaskParam& goal);

struct VelState {
  double velocity = 0.0;
  bool alive = true;
};

struct VelStep {
  VelState state;
  double reward = 0.0;
};

/// Reward is evaluated at the velocity the step starts from:
/// -|v - v_target| + 1 + (alive ? 0.05 : 0) - 0.01 * a^2 with a clipped.
VelStep vel_step(const EnvSpec& spec, const VelState& state, double action,
                 const TaskParam& v_target);

struct Trajectory {
  TaskParam task;
  Eigen::MatrixXd states;   // T x obs_dim
  Eigen::MatrixXd actions;  // T x act_dim, unclipped policy samples
  std::vector<double> rewards;

  int length() const { return static_cast<int>(rewards.size()); }
  double total_reward() const;
};

/// Collects `count` episodes in lockstep under pi_theta. Action noise is drawn
/// step-major, episode-minor from rng, so a batch of one equals rollout().
std::vector<Trajectory> rollout_batch(const EnvSpec& spec, const PolicyArchitecture& arch,
                                      const PolicyParams& theta, const TaskParam& task,
                                      int horizon, int count, Rng& rng);

Trajectory rollout(const EnvSpec& spec, const PolicyArchitecture& arch, const PolicyParams& theta,
                   const TaskParam& task, int horizon, Rng& rng);

}  // namespace gts
