#include "gts/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "gts/envs.hpp"
#include "gts/guided_sampler.hpp"
#include "gts/meta_learner.hpp"
#include "gts/metrics.hpp"
#include "gts/region_scheduler.hpp"
#include "gts/score_model.hpp"

namespace gts {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

// True when the pieces tile [lo, hi] with both ends closed and no gaps.
bool tiles_closed(std::vector<Interval> pieces, double lo, double hi) {
  if (pieces.empty()) return false;
  std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  if (pieces.front().lo != lo || !pieces.front().lo_closed) return false;
  if (pieces.back().hi != hi || !pieces.back().hi_closed) return false;
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    const Interval& a = pieces[i - 1];
    const Interval& b = pieces[i];
    if (a.hi != b.lo || a.hi_closed == b.lo_closed) return false;
  }
  return true;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

}  // namespace

CheckResult check_sampling_math() {
  CheckResult r{"sampling math", true, ""};
  const std::vector<double> centers{0.05, 0.15, 0.25};
  const std::vector<double> f{0.0, 0.5, 1.0};
  const BinDistribution d = probability(centers, f, 0.1);
  const double expect[3] = {2.0 / 3.0, 1.0 / 3.0, 0.0};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(d.probs[i] - expect[i]));

  Rng rng(7);
  std::normal_distribution<double> noise(0.0, 30.0);
  ScoreTable table(TaskBounds(0.0, 3.0), 0.1);
  for (int epoch = 0; epoch < 20; ++epoch)
    for (int k = 0; k < 40; ++k) {
      const double x = 3.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      table.add({TaskParam(x), x, epoch, 100.0 - 30.0 * x + noise(rng)});
    }
  const ScoreCurve curve = build_curve(table);
  const BinDistribution p = probability(curve);
  double sum = 0.0;
  for (double v : p.probs) sum += v;

  double knot_err = 0.0;
  for (std::size_t i = 0; i < curve.knot_x.size(); ++i)
    knot_err = std::max(knot_err, std::abs((*curve.interpolant)(curve.knot_x[i]) - curve.knot_y[i]));

  r.passed = worst <= 1e-15 && std::abs(sum - 1.0) <= 1e-12 && knot_err <= 1e-9;
  r.detail = fmt("closed-form error %.3g, |sum-1| %.3g, knot error %.3g", worst, std::abs(sum - 1.0), knot_err);
  return r;
}

CheckResult check_region_schedule(int trials) {
  CheckResult r{"region schedule", true, ""};
  const TaskBounds bounds(0.0, 3.0);
  const int n_epoch = 200;
  const int n_interval = 10;
  Rng rng(11);
  std::uniform_real_distribution<double> score(-100.0, 100.0);
  int mismatches = 0;
  int bad_cover = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<ScoredTask> scored;
    const SamplingPlan grid = epoch0_grid(bounds, 40);
    for (const auto& task : grid.tasks) scored.push_back({task.task, score(rng)});
    const double tau_mean = estimate_tau_mean(scored);
    const Schedule s = make_schedule(n_epoch, n_interval, bounds, tau_mean);
    RegionPartition p = initial_partition(tau_mean, s, bounds);

    // Hand iteration: every 10 epochs from epoch 100, m1 <- m2, m2 <- m2 + d.
    const double d = (3.0 - tau_mean) / 10.0;
    double m1 = tau_mean;
    double m2 = tau_mean + 0.5 * (0.5 * 200 / 10) * 0.5 * d;
    if (std::abs(p.tau_middle1 - m1) > 1e-12 || std::abs(p.tau_middle2 - std::min(m2, 3.0)) > 1e-12)
      ++mismatches;
    for (int epoch = 1; epoch < n_epoch; ++epoch) {
      p = advance(p, s, epoch);
      if (epoch >= 100 && (epoch - 100) % 10 == 0) {
        m1 = std::min(m2, 3.0);
        m2 = std::min(m2 + d, 3.0);
      }
      if (std::abs(p.tau_middle1 - m1) > 1e-12 || std::abs(p.tau_middle2 - m2) > 1e-12) ++mismatches;
    }
    std::vector<Interval> cover = p.easy.pieces();
    cover.insert(cover.end(), p.middle.pieces().begin(), p.middle.pieces().end());
    if (!tiles_closed(cover, 0.0, 3.0)) ++bad_cover;
  }
  r.passed = mismatches == 0 && bad_cover == 0;
  r.detail = std::to_string(trials) + " trials, " + std::to_string(mismatches) + " boundary mismatches, " +
             std::to_string(bad_cover) + " end states not covering [0,3]";
  return r;
}

CheckResult check_sampler_fidelity(int draws) {
  CheckResult r{"sampler fidelity", true, ""};
  const TaskBounds bounds(0.0, 3.0);
  const double w = 0.1;
  const RegionPartition part = make_partition(1.0, 2.0, bounds);
  std::vector<double> centers;
  std::vector<double> probs;
  for (int k = 0; k < 30; ++k) {
    centers.push_back(w * k + 0.5 * w);
    probs.push_back(k < 10 && k % 3 == 0 ? 0.0 : 1.0 + std::sin(0.7 * k) * 0.8);
  }
  double total = 0.0;
  for (double p : probs) total += p;
  for (double& p : probs) p /= total;
  const BinDistribution dist{centers, probs, w};

  SamplerConfig cfg;
  cfg.n_batch = 100;
  cfg.delta = 0.1;
  cfg.d_tau_bin = w;
  Rng rng(2024);
  std::vector<double> easy_hist(10, 0.0), mid_hist(10, 0.0);
  double n_easy = 0, n_mid = 0;
  while (n_mid < draws) {
    for (const auto& t : sample_batch(part, dist, cfg, DifficultyCoordinate::identity, rng).tasks) {
      const int k = std::clamp(static_cast<int>(std::floor(t.coordinate / w)), 0, 29);
      if (t.label == TaskLabel::easy) {
        easy_hist[static_cast<std::size_t>(k)] += 1;
        n_easy += 1;
      } else {
        mid_hist[static_cast<std::size_t>(k - 10)] += 1;
        n_mid += 1;
      }
    }
  }
  for (double& v : easy_hist) v /= n_easy;
  for (double& v : mid_hist) v /= n_mid;

  double easy_mass = 0, mid_mass = 0;
  for (int k = 0; k < 10; ++k) easy_mass += probs[static_cast<std::size_t>(k)];
  for (int k = 10; k < 20; ++k) mid_mass += probs[static_cast<std::size_t>(k)];
  std::vector<double> easy_target(10), mid_target(10);
  for (int k = 0; k < 10; ++k) {
    easy_target[static_cast<std::size_t>(k)] = 0.1 * cfg.delta + (1 - cfg.delta) * probs[static_cast<std::size_t>(k)] / easy_mass;
    mid_target[static_cast<std::size_t>(k)] = probs[static_cast<std::size_t>(k + 10)] / mid_mass;
  }
  const double tv_easy = total_variation(easy_hist, easy_target);
  const double tv_mid = total_variation(mid_hist, mid_target);

  // Zero-mass easy bins only receive the uniform share.
  double zero_frac = 0.0;
  int zero_bins = 0;
  for (int k = 0; k < 10; k += 3) {
    zero_frac += easy_hist[static_cast<std::size_t>(k)];
    ++zero_bins;
  }
  const double delta_hat = zero_frac / (0.1 * zero_bins);

  // Symmetric partition: 20 middle draws per batch, 10 per lobe.
  const TaskBounds sym(-3.0, 3.0);
  const RegionPartition sp = make_partition(1.0, 2.0, sym);
  std::vector<double> sc, sprobs;
  for (int k = 0; k < 60; ++k) {
    sc.push_back(-3.0 + w * k + 0.5 * w);
    sprobs.push_back(1.0 / 60.0);
  }
  SamplerConfig scfg;
  scfg.n_batch = 40;
  int uneven = 0;
  for (int b = 0; b < 500; ++b) {
    int pos = 0, neg = 0;
    for (const auto& t : sample_batch(sp, {sc, sprobs, w}, scfg, DifficultyCoordinate::identity, rng).tasks) {
      if (t.label != TaskLabel::middle) continue;
      (t.coordinate > 0 ? pos : neg) += 1;
    }
    if (pos != 10 || neg != 10) ++uneven;
  }

  r.passed = tv_easy <= 0.01 && tv_mid <= 0.01 && std::abs(delta_hat - cfg.delta) <= 0.01 && uneven == 0;
  r.detail = fmt("TV easy %.4f, TV middle %.4f, mixture %.4f", tv_easy, tv_mid, delta_hat) +
             ", uneven symmetric batches " + std::to_string(uneven);
  return r;
}

CheckResult check_policy_gradient(int instances) {
  CheckResult r{"policy gradient", true, ""};
  const PolicyArchitecture arch{2, 1, {4, 4}};
  Rng rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> len(3, 12);
  double worst = 0.0;
  for (int inst = 0; inst < instances; ++inst) {
    PolicyParams theta = init_policy(arch, rng, -0.3);
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] += 0.3 * normal(rng);
    std::vector<Trajectory> trajs(4);
    for (auto& t : trajs) {
      const int T = len(rng);
      t.task = TaskParam(1.0);
      t.states = Eigen::MatrixXd(T, 2);
      t.actions = Eigen::MatrixXd(T, 1);
      for (int s = 0; s < T; ++s) {
        t.states(s, 0) = normal(rng);
        t.states(s, 1) = normal(rng);
        t.actions(s, 0) = normal(rng);
        t.rewards.push_back(normal(rng));
      }
    }
    const LossGradient g = policy_loss_gradient(arch, theta, trajs, 0.9);
    Eigen::VectorXd fd(theta.size());
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      PolicyParams a = theta, b = theta;
      a[i] += h;
      b[i] -= h;
      fd[i] = (policy_loss(arch, a, trajs, 0.9) - policy_loss(arch, b, trajs, 0.9)) / (2 * h);
    }
    worst = std::max(worst, (g.gradient - fd).norm() / std::max(fd.norm(), 1e-12));
  }
  r.passed = worst <= 1e-4;
  r.detail = std::to_string(instances) + " instances, " + std::to_string(arch.param_count()) +
             " parameters, worst relative error " + fmt("%.3g", worst);
  return r;
}

CheckResult check_bias_arithmetic() {
  CheckResult r{"bias arithmetic", true, ""};
  SweepResult sweep;
  sweep.step = 0.5;
  const double post[] = {50.0, 71.71, 64.06, 60.0, 10.0, -5.0, -20.0};
  for (int i = 0; i < 7; ++i) {
    const double x = 0.5 * i;
    sweep.entries.push_back({TaskParam(x), x, post[i], post[i], {}});
  }
  const double b1 = bias_score(sweep, 1.0);
  const auto s = summarize(sweep, std::vector<TauRange>{{0.0, 3.0}}, std::vector<double>{1.0});
  const bool max_ok = s.highest_score == 71.71 && s.tau_at_highest == 0.5;
  // R(v=1) = max + bias.
  const bool recon = std::abs(s.highest_score + b1 - 64.06) <= 1e-12;
  r.passed = max_ok && std::abs(b1 - (-7.65)) <= 1e-12 && recon && s.min_negative_tau == 2.5;
  r.detail = fmt("max %.2f, bias at 1 %.12g, R(1) = %.12g", s.highest_score, b1, s.highest_score + b1);
  return r;
}

std::vector<CheckResult> run_invariant_checks() {
  return {check_sampling_math(), check_region_schedule(), check_sampler_fidelity(),
          check_policy_gradient(), check_bias_arithmetic()};
}

}  // namespace gts
