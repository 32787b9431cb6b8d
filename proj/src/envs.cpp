#include "gts/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gts/error.hpp"

namespace gts {

namespace {

constexpr double kSurvivalBonus = 0.05;
constexpr double kActionCost = 0.01;

}  // namespace

const char* to_string(EnvKind kind) {
  return kind == EnvKind::navigation2d ? "navigation2d" : "velocity1d";
}

EnvKind env_kind_from_string(const std::string& text) {
  if (text == "navigation2d") return EnvKind::navigation2d;
  if (text == "velocity1d") return EnvKind::velocity1d;
  throw InputError("unknown environment '" + text + "'");
}

EnvSpec EnvSpec::navigation() {
  EnvSpec s;
  s.kind = EnvKind::navigation2d;
  s.action_limit = 0.1;
  return s;
}

EnvSpec EnvSpec::velocity(double train_tau_max) {
  EnvSpec s;
  s.kind = EnvKind::velocity1d;
  s.action_limit = 1.0;
  s.velocity_limit = 2.0 * std::max(std::abs(train_tau_max), 1.0);
  return s;
}

void EnvSpec::validate() const {
  if (horizon < 0) throw InputError("horizon must be non-negative");
  if (!(action_limit > 0.0)) throw InputError("action_limit must be positive");
  if (!(dt > 0.0) || !(velocity_limit > 0.0)) throw InputError("invalid velocity dynamics");
}

NavStep nav_step(const EnvSpec& spec, const NavState& state, std::array<double, 2> action,
                 const TaskParam& goal) {
  if (goal.dim() != 2) throw InputError("navigation goal must be 2D");
  const double lim = spec.action_limit;
  NavStep out;
  out.state.x = state.x + std::clamp(action[0], -lim, lim);
  out.state.y = state.y + std::clamp(action[1], -lim, lim);
  const double dist = std::hypot(out.state.x - goal[0], out.state.y - goal[1]);
  out.reward = -dist;
  out.terminal = dist < spec.goal_tolerance;
  return out;
}

VelStep vel_step(const EnvSpec& spec, const VelState& state, double action,
                 const TaskParam& v_target) {
  if (v_target.dim() != 1) throw InputError("velocity target must be 1D");
  const double a = std::clamp(action, -spec.action_limit, spec.action_limit);
  const double v = state.velocity;
  VelStep out;
  out.reward = -std::abs(v - v_target[0]) + 1.0 + (state.alive ? kSurvivalBonus : 0.0) -
               kActionCost * a * a;
  out.state.velocity = v + spec.dt * (spec.gain * a - spec.drag * v);
  out.state.alive = state.alive && std::abs(out.state.velocity) <= spec.velocity_limit;
  return out;
}

double Trajectory::total_reward() const {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

std::vector<Trajectory> rollout_batch(const EnvSpec& spec, const PolicyArchitecture& arch,
                                      const PolicyParams& theta, const TaskParam& task,
                                      int horizon, int count, Rng& rng) {
  if (horizon < 0) throw InputError("horizon must be non-negative");
  if (count < 1) throw InputError("rollout count must be positive");
  if (task.dim() != spec.task_dim()) throw InputError("task dimension does not match environment");
  if (arch.obs_dim != spec.obs_dim() || arch.act_dim != spec.act_dim())
    throw InputError("policy does not match environment");

  const int od = spec.obs_dim();
  const int ad = spec.act_dim();
  const bool nav = spec.kind == EnvKind::navigation2d;
  const Eigen::VectorXd std_dev = policy_log_std(arch, theta).array().exp();

  std::vector<NavState> nav_states(static_cast<std::size_t>(count));
  std::vector<VelState> vel_states(static_cast<std::size_t>(count));
  std::vector<bool> done(static_cast<std::size_t>(count), false);
  std::vector<std::vector<double>> obs_log(static_cast<std::size_t>(count));
  std::vector<std::vector<double>> act_log(static_cast<std::size_t>(count));
  std::vector<std::vector<double>> rew_log(static_cast<std::size_t>(count));

  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::MatrixXd obs(count, od);
  std::vector<int> active;
  for (int t = 0; t < horizon; ++t) {
    active.clear();
    for (int i = 0; i < count; ++i)
      if (!done[static_cast<std::size_t>(i)]) active.push_back(i);
    if (active.empty()) break;

    obs.resize(static_cast<Eigen::Index>(active.size()), od);
    for (std::size_t r = 0; r < active.size(); ++r) {
      const auto i = static_cast<std::size_t>(active[r]);
      if (nav) {
        obs(static_cast<Eigen::Index>(r), 0) = nav_states[i].x;
        obs(static_cast<Eigen::Index>(r), 1) = nav_states[i].y;
      } else {
        obs(static_cast<Eigen::Index>(r), 0) = vel_states[i].velocity;
      }
    }
    const Eigen::MatrixXd mean = policy_mean(arch, theta, obs);

    for (std::size_t r = 0; r < active.size(); ++r) {
      const auto i = static_cast<std::size_t>(active[r]);
      const auto row = static_cast<Eigen::Index>(r);
      std::array<double, 2> action{0.0, 0.0};
      for (int d = 0; d < ad; ++d) {
        action[static_cast<std::size_t>(d)] = mean(row, d) + std_dev[d] * noise(rng);
        if (!std::isfinite(action[static_cast<std::size_t>(d)]))
          throw RunError("non-finite action for task " + task.to_string() + " at step " +
                         std::to_string(t));
      }
      for (int d = 0; d < od; ++d) obs_log[i].push_back(obs(row, d));
      for (int d = 0; d < ad; ++d) act_log[i].push_back(action[static_cast<std::size_t>(d)]);

      double reward = 0.0;
      bool finite = true;
      if (nav) {
        const NavStep s = nav_step(spec, nav_states[i], action, task);
        nav_states[i] = s.state;
        reward = s.reward;
        done[i] = s.terminal;
        finite = std::isfinite(s.state.x) && std::isfinite(s.state.y);
      } else {
        const VelStep s = vel_step(spec, vel_states[i], action[0], task);
        vel_states[i] = s.state;
        reward = s.reward;
        finite = std::isfinite(s.state.velocity);
      }
      if (!finite || !std::isfinite(reward))
        throw RunError("non-finite state for task " + task.to_string() + " at step " +
                       std::to_string(t));
      rew_log[i].push_back(reward);
    }
  }

  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
    Trajectory traj;
    traj.task = task;
    const auto len = static_cast<Eigen::Index>(rew_log[i].size());
    traj.states = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        obs_log[i].data(), len, od);
    traj.actions = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        act_log[i].data(), len, ad);
    traj.rewards = std::move(rew_log[i]);
    out.push_back(std::move(traj));
  }
  return out;
}

Trajectory rollout(const EnvSpec& spec, const PolicyArchitecture& arch, const PolicyParams& theta,
                   const TaskParam& task, int horizon, Rng& rng) {
  return std::move(rollout_batch(spec, arch, theta, task, horizon, 1, rng).front());
}

}  // namespace gts
