#include "gts/policy.hpp"

#include <cmath>
#include <random>

#include "gts/error.hpp"

namespace gts {

void PolicyArchitecture::validate() const {
  if (obs_dim < 1 || act_dim < 1) throw InputError("policy dimensions must be positive");
  for (int h : hidden)
    if (h < 1) throw InputError("hidden layer widths must be positive");
}

Eigen::Index PolicyArchitecture::param_count() const { return log_std_offset() + act_dim; }

Eigen::Index PolicyArchitecture::log_std_offset() const {
  Eigen::Index n = 0;
  int in = obs_dim;
  for (int h : hidden) {
    n += static_cast<Eigen::Index>(in) * h + h;
    in = h;
  }
  n += static_cast<Eigen::Index>(in) * act_dim + act_dim;
  return n;
}

// Near-zero initial mean actions.
constexpr double kHeadScale = 0.01;

PolicyParams init_policy(const PolicyArchitecture& arch, Rng& rng, double init_log_std) {
  arch.validate();
  PolicyParams theta(arch.param_count());
  Eigen::Index pos = 0;
  int in = arch.obs_dim;
  std::vector<int> widths = arch.hidden;
  widths.push_back(arch.act_dim);
  for (std::size_t l = 0; l < widths.size(); ++l) {
    const int out = widths[l];
    const bool head = l + 1 == widths.size();
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    const Eigen::Index n_w = static_cast<Eigen::Index>(in) * out;
    for (Eigen::Index i = 0; i < n_w; ++i) theta[pos++] = head ? kHeadScale * u(rng) : u(rng);
    for (int i = 0; i < out; ++i) theta[pos++] = head ? 0.0 : u(rng);
    in = out;
  }
  for (int i = 0; i < arch.act_dim; ++i) theta[pos++] = init_log_std;
  return theta;
}

Eigen::MatrixXd policy_mean(const PolicyArchitecture& arch, const PolicyParams& theta,
                            const Eigen::MatrixXd& obs) {
  if (theta.size() != arch.param_count()) throw InputError("parameter vector has the wrong length");
  if (obs.cols() != arch.obs_dim) throw InputError("observation width does not match the policy");
  Eigen::MatrixXd h = obs;
  Eigen::Index pos = 0;
  int in = arch.obs_dim;
  const auto layer = [&](int out, bool activate) {
    Eigen::Map<const Eigen::MatrixXd> w(theta.data() + pos, in, out);
    pos += static_cast<Eigen::Index>(in) * out;
    Eigen::Map<const Eigen::RowVectorXd> b(theta.data() + pos, out);
    pos += out;
    Eigen::MatrixXd z = h * w;
    z.rowwise() += b;
    h = activate ? Eigen::MatrixXd(z.array().tanh().matrix()) : std::move(z);
    in = out;
  };
  for (int width : arch.hidden) layer(width, true);
  layer(arch.act_dim, false);
  return h;
}

Eigen::VectorXd policy_log_std(const PolicyArchitecture& arch, const PolicyParams& theta) {
  return theta.segment(arch.log_std_offset(), arch.act_dim);
}

PolicyGraph record_policy(ad::Tape& tape, const PolicyArchitecture& arch,
                          const PolicyParams& theta, const Eigen::MatrixXd& obs) {
  if (theta.size() != arch.param_count()) throw InputError("parameter vector has the wrong length");
  ad::Var h = tape.constant(obs);
  std::size_t pos = 0;
  int in = arch.obs_dim;
  std::vector<int> widths = arch.hidden;
  widths.push_back(arch.act_dim);
  for (std::size_t l = 0; l < widths.size(); ++l) {
    const int out = widths[l];
    ad::Var w = tape.parameter(theta, pos, in, out);
    pos += static_cast<std::size_t>(in) * out;
    ad::Var b = tape.parameter(theta, pos, 1, out);
    pos += static_cast<std::size_t>(out);
    h = tape.affine(h, w, b);
    if (l + 1 < widths.size()) h = tape.tanh(h);
    in = out;
  }
  ad::Var log_std = tape.parameter(theta, pos, 1, arch.act_dim);
  return {h, log_std};
}

}  // namespace gts
