#include "gts/meta_learner.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <thread>

#include "gts/error.hpp"
#include "gts/score_model.hpp"

namespace gts {

void MetaConfig::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw InputError("step sizes must be non-negative");
  if (n_samples < 1) throw InputError("n_samples must be at least 1");
  if (horizon < 0) throw InputError("horizon must be non-negative");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("gamma must lie in (0,1]");
  if (workers < 1) throw InputError("workers must be at least 1");
}

std::vector<double> returns_to_go(std::span<const double> rewards, double gamma) {
  std::vector<double> g(rewards.size());
  double running = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    running = rewards[t] + gamma * running;
    g[t] = running;
  }
  return g;
}

std::vector<std::vector<double>> advantages(std::span<const Trajectory> trajectories, double gamma) {
  std::vector<std::vector<double>> adv;
  adv.reserve(trajectories.size());
  std::size_t longest = 0;
  for (const auto& traj : trajectories) {
    adv.push_back(returns_to_go(traj.rewards, gamma));
    longest = std::max(longest, adv.back().size());
  }
  std::vector<double> baseline(longest, 0.0);
  std::vector<int> count(longest, 0);
  for (const auto& g : adv)
    for (std::size_t t = 0; t < g.size(); ++t) {
      baseline[t] += g[t];
      ++count[t];
    }
  for (std::size_t t = 0; t < longest; ++t) baseline[t] /= count[t];
  for (auto& g : adv)
    for (std::size_t t = 0; t < g.size(); ++t) g[t] -= baseline[t];
  return adv;
}

namespace {

struct LossGraph {
  ad::Tape tape;
  ad::Var loss;
};

void build_loss(LossGraph& graph, const PolicyArchitecture& arch, const PolicyParams& theta,
                std::span<const Trajectory> trajectories, double gamma) {
  if (trajectories.empty()) throw InputError("policy_loss needs at least one trajectory");
  const TaskParam& task = trajectories.front().task;
  Eigen::Index rows = 0;
  for (const auto& traj : trajectories) {
    if (!(traj.task == task)) throw InputError("policy_loss trajectories must share one task");
    rows += traj.length();
  }

  Eigen::MatrixXd obs(rows, arch.obs_dim);
  Eigen::MatrixXd actions(rows, arch.act_dim);
  Eigen::MatrixXd weights(rows, 1);
  const auto adv = advantages(trajectories, gamma);
  Eigen::Index r = 0;
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const auto& traj = trajectories[k];
    const Eigen::Index len = traj.length();
    if (len == 0) continue;
    obs.middleRows(r, len) = traj.states;
    actions.middleRows(r, len) = traj.actions;
    for (Eigen::Index t = 0; t < len; ++t) weights(r + t, 0) = adv[k][static_cast<std::size_t>(t)];
    r += len;
  }

  ad::Tape& tape = graph.tape;
  const PolicyGraph pi = record_policy(tape, arch, theta, obs);
  // log N(a; mu, sigma) = -0.5 sum z^2 - sum log sigma - 0.5 d log(2 pi)
  ad::Var inv_std = tape.exp(tape.scale(pi.log_std, -1.0));
  ad::Var z = tape.mul(tape.sub(tape.constant(actions), pi.mean), inv_std);
  ad::Var quad = tape.scale(tape.row_sum(tape.square(z)), -0.5);
  ad::Var norm = tape.add(tape.sum(pi.log_std),
                          tape.constant(Eigen::MatrixXd::Constant(
                              1, 1, 0.5 * arch.act_dim * std::log(2.0 * std::numbers::pi))));
  ad::Var log_prob = tape.sub(quad, norm);
  ad::Var weighted = tape.sum(tape.mul(log_prob, tape.constant(weights)));
  graph.loss = tape.scale(weighted, -1.0 / static_cast<double>(trajectories.size()));
}

}  // namespace

double policy_loss(const PolicyArchitecture& arch, const PolicyParams& theta,
                   std::span<const Trajectory> trajectories, double gamma) {
  LossGraph graph;
  build_loss(graph, arch, theta, trajectories, gamma);
  return graph.tape.scalar(graph.loss);
}

LossGradient policy_loss_gradient(const PolicyArchitecture& arch, const PolicyParams& theta,
                                  std::span<const Trajectory> trajectories, double gamma) {
  LossGraph graph;
  build_loss(graph, arch, theta, trajectories, gamma);
  return {graph.tape.scalar(graph.loss), graph.tape.gradient(graph.loss, arch.param_count())};
}

RolloutObjective::RolloutObjective(EnvSpec env, PolicyArchitecture arch, int n_samples,
                                   int horizon, double gamma)
    : env_(env), arch_(std::move(arch)), n_samples_(n_samples), horizon_(horizon), gamma_(gamma) {
  env_.validate();
  arch_.validate();
  if (n_samples < 1) throw InputError("n_samples must be at least 1");
}

TaskEstimate RolloutObjective::estimate(const Eigen::VectorXd& theta, const TaskParam& task,
                                        Rng& rng) const {
  const auto trajectories = rollout_batch(env_, arch_, theta, task, horizon_, n_samples_, rng);
  std::vector<double> totals;
  totals.reserve(trajectories.size());
  for (const auto& traj : trajectories) totals.push_back(traj.total_reward());

  TaskEstimate est;
  est.r_mean = mean_total_reward(totals);
  if (horizon_ == 0) {
    est.gradient = Eigen::VectorXd::Zero(arch_.param_count());
    return est;
  }
  auto lg = policy_loss_gradient(arch_, theta, trajectories, gamma_);
  est.loss = lg.loss;
  est.gradient = std::move(lg.gradient);
  return est;
}

Eigen::VectorXd clip_gradient(const Eigen::VectorXd& g, double max_norm) {
  const double norm = g.norm();
  if (!std::isfinite(norm)) {
    Eigen::Index bad = 0;
    for (; bad < g.size(); ++bad)
      if (!std::isfinite(g[bad])) break;
    throw RunError("non-finite gradient (first bad component " + std::to_string(bad) + " of " +
                   std::to_string(g.size()) + ")");
  }
  if (max_norm > 0.0 && norm > max_norm) return g * (max_norm / norm);
  return g;
}

Adaptation adapt_with_estimate(const Eigen::VectorXd& theta, const TaskParam& task,
                               const MetaConfig& config, const TaskObjective& objective, Rng& rng) {
  Adaptation out;
  out.pre = objective.estimate(theta, task, rng);
  try {
    out.adapted = theta - config.alpha * clip_gradient(out.pre.gradient, config.grad_clip);
  } catch (const RunError& e) {
    throw RunError(std::string(e.what()) + " while adapting to task " + task.to_string());
  }
  return out;
}

Eigen::VectorXd adapt(const Eigen::VectorXd& theta, const TaskParam& task, const MetaConfig& config,
                      const TaskObjective& objective, Rng& rng) {
  return adapt_with_estimate(theta, task, config, objective, rng).adapted;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

std::uint64_t task_key(const TaskParam& task) {
  std::uint64_t key = task.dim();
  for (double v : task.values()) key = mix64(key ^ std::bit_cast<std::uint64_t>(v));
  return key;
}

}  // namespace

MetaUpdate meta_update(const Eigen::VectorXd& theta, const SamplingPlan& batch,
                       const MetaConfig& config, const TaskObjective& objective,
                       std::uint64_t stream_seed) {
  config.validate();
  if (batch.tasks.empty()) throw InputError("meta_update needs a nonempty batch");
  const auto n = static_cast<int>(batch.tasks.size());

  // Repeated tasks get distinct streams by occurrence count.
  std::vector<std::uint64_t> keys(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::uint64_t occurrence = 0;
    for (int j = 0; j < i; ++j)
      if (batch.tasks[static_cast<std::size_t>(j)].task == batch.tasks[static_cast<std::size_t>(i)].task)
        ++occurrence;
    keys[static_cast<std::size_t>(i)] =
        derive_seed(stream_seed, {task_key(batch.tasks[static_cast<std::size_t>(i)].task), occurrence});
  }

  struct Slot {
    std::optional<TaskEstimate> post;
    double pre_r_mean = 0.0;
    std::string error;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n));

  parallel_for(n, config.workers, [&](int i) {
    const auto& planned = batch.tasks[static_cast<std::size_t>(i)];
    auto& slot = slots[static_cast<std::size_t>(i)];
    try {
      Rng pre_rng(derive_seed(keys[static_cast<std::size_t>(i)], {0}));
      Rng post_rng(derive_seed(keys[static_cast<std::size_t>(i)], {1}));
      Adaptation adaptation = adapt_with_estimate(theta, planned.task, config, objective, pre_rng);
      slot.pre_r_mean = adaptation.pre.r_mean;
      slot.post = objective.estimate(adaptation.adapted, planned.task, post_rng);
      clip_gradient(slot.post->gradient, 0.0);  // finiteness check
    } catch (const RunError& e) {
      slot.post.reset();
      slot.error = e.what();
    }
  });

  MetaUpdate out;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(theta.size());
  for (int i = 0; i < n; ++i) {
    const auto& slot = slots[static_cast<std::size_t>(i)];
    const auto& planned = batch.tasks[static_cast<std::size_t>(i)];
    if (!slot.post) {
      ++out.failed;
      std::cerr << "warning: task " << planned.task.to_string() << " excluded: " << slot.error << '\n';
      continue;
    }
    total += slot.post->gradient;
    out.scores.push_back(
        {planned.task, planned.coordinate, planned.label, slot.post->r_mean, slot.pre_r_mean});
  }
  if (out.scores.empty()) throw RunError("every task in the batch failed");
  out.theta = theta - config.beta * clip_gradient(total, config.grad_clip);
  return out;
}

}  // namespace gts
