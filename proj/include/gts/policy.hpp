#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gts/autodiff.hpp"
#include "gts/rng.hpp"

namespace gts {

/// Feed-forward Gaussian policy: tanh hidden layers, linear mean head and a
/// state-independent log-std per action dimension.
///
/// Flat parameter layout: for each layer W (in x out, column-major) then
/// b (1 x out); the log-std vector comes last.
struct PolicyArchitecture {
  int obs_dim = 1;
  int act_dim = 1;
  std::vector<int> hidden{64, 64};

  Eigen::Index param_count() const;
  Eigen::Index log_std_offset() const;
  void validate() const;

  friend bool operator==(const PolicyArchitecture&, const PolicyArchitecture&) = default;
};

using PolicyParams = Eigen::VectorXd;

/// Hidden weights and biases uniform in +-1/sqrt(fan_in); the mean head is
/// scaled by 0.01 with zero bias; log-std set to init_log_std.
PolicyParams init_policy(const PolicyArchitecture& arch, Rng& rng, double init_log_std = 0.0);

/// Action means for a batch of observations (rows).
Eigen::MatrixXd policy_mean(const PolicyArchitecture& arch, const PolicyParams& theta,
                            const Eigen::MatrixXd& obs);

Eigen::VectorXd policy_log_std(const PolicyArchitecture& arch, const PolicyParams& theta);

struct PolicyGraph {
  ad::Var mean;
  ad::Var log_std;
};

/// Records the policy forward pass on a tape.
PolicyGraph record_policy(ad::Tape& tape, const PolicyArchitecture& arch,
                          const PolicyParams& theta, const Eigen::MatrixXd& obs);

}  // namespace gts
