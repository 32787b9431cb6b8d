#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gts/envs.hpp"
#include "gts/guided_sampler.hpp"
#include "gts/policy.hpp"
#include "gts/rng.hpp"

namespace gts {

struct MetaConfig {
  double alpha = 0.01;  // inner step size
  double beta = 0.01;   // outer step size
  int n_samples = 20;   // rollouts per task per gradient estimate
  int horizon = 100;
  double gamma = 0.99;
  double grad_clip = 10.0;  // max gradient norm on both loops; <= 0 disables
  int workers = 1;

  void validate() const;
};

/// Discounted return-to-go G_t = sum_{k>=t} gamma^(k-t) r_k.
std::vector<double> returns_to_go(std::span<const double> rewards, double gamma);

/// Per-step advantages G_t - b_t, where b_t is the mean G_t over the
/// trajectories that reached step t.
std::vector<std::vector<double>> advantages(std::span<const Trajectory> trajectories, double gamma);

/// REINFORCE surrogate with a per-timestep mean baseline:
/// mean over trajectories of sum_t -log pi(a_t|s_t) * (G_t - b_t).
double policy_loss(const PolicyArchitecture& arch, const PolicyParams& theta,
                   std::span<const Trajectory> trajectories, double gamma);

struct LossGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;
};

LossGradient policy_loss_gradient(const PolicyArchitecture& arch, const PolicyParams& theta,
                                  std::span<const Trajectory> trajectories, double gamma);

/// Result of estimating one task's loss at some parameter vector.
struct TaskEstimate {
  Eigen::VectorXd gradient;
  double loss = 0.0;
  double r_mean = 0.0;  // mean undiscounted episode return
};

/// Source of per-task gradient estimates. Implementations must be safe to call
/// concurrently from several threads.
class TaskObjective {
 public:
  virtual ~TaskObjective() = default;
  virtual TaskEstimate estimate(const Eigen::VectorXd& theta, const TaskParam& task,
                                Rng& rng) const = 0;
};

/// Rolls out n_samples episodes under pi_theta and differentiates policy_loss.
class RolloutObjective final : public TaskObjective {
 public:
  RolloutObjective(EnvSpec env, PolicyArchitecture arch, int n_samples, int horizon, double gamma);

  TaskEstimate estimate(const Eigen::VectorXd& theta, const TaskParam& task,
                        Rng& rng) const override;

  const EnvSpec& env() const { return env_; }
  const PolicyArchitecture& architecture() const { return arch_; }

 private:
  EnvSpec env_;
  PolicyArchitecture arch_;
  int n_samples_;
  int horizon_;
  double gamma_;
};

/// Scales g down to max_norm when longer. Throws RunError on non-finite input.
Eigen::VectorXd clip_gradient(const Eigen::VectorXd& g, double max_norm);

struct Adaptation {
  Eigen::VectorXd adapted;
  TaskEstimate pre;  // estimate under the unadapted parameters
};

/// theta' = theta - alpha * clip(grad L(theta)); theta itself is untouched.
Adaptation adapt_with_estimate(const Eigen::VectorXd& theta, const TaskParam& task,
                               const MetaConfig& config, const TaskObjective& objective, Rng& rng);

Eigen::VectorXd adapt(const Eigen::VectorXd& theta, const TaskParam& task, const MetaConfig& config,
                      const TaskObjective& objective, Rng& rng);

struct TaskScore {
  TaskParam task;
  double coordinate = 0.0;
  TaskLabel label = TaskLabel::grid;
  double r_mean = 0.0;  // post-adaptation
  double pre_r_mean = 0.0;
};

struct MetaUpdate {
  Eigen::VectorXd theta;
  std::vector<TaskScore> scores;  // one per task that completed, in plan order
  int failed = 0;
};

/// First-order meta step: every task adapts from the same theta, the gradient
/// of its loss at theta'_i is summed over tasks, and
/// theta <- theta - beta * clip(sum). Random streams are keyed by the task
/// value, so per-task results do not depend on plan order or worker count.
MetaUpdate meta_update(const Eigen::VectorXd& theta, const SamplingPlan& batch,
                       const MetaConfig& config, const TaskObjective& objective,
                       std::uint64_t stream_seed);

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace gts
