#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gts/envs.hpp"
#include "gts/error.hpp"

using namespace gts;

TEST_CASE("navigation step") {
  const EnvSpec env = EnvSpec::navigation();
  NavStep s = nav_step(env, {0, 0}, {0, 0}, TaskParam(3.0, 4.0));
  CHECK(s.reward == -5.0);
  CHECK_FALSE(s.terminal);
  s = nav_step(env, {0, 0}, {0.5, 0}, TaskParam(1.0, 0.0));
  CHECK(s.state.x == doctest::Approx(0.1));
  CHECK(s.state.y == 0.0);
  CHECK(s.reward == doctest::Approx(-0.9));
  s = nav_step(env, {1, 2}, {0, 0}, TaskParam(1.0, 2.0));
  CHECK(s.reward == 0.0);
  CHECK(s.terminal);
}

TEST_CASE("velocity step rewards") {
  const EnvSpec env = EnvSpec::velocity(3.0);
  CHECK(vel_step(env, {1.5, true}, 0.0, TaskParam(1.5)).reward == doctest::Approx(1.05));
  CHECK(vel_step(env, {0.0, true}, 0.0, TaskParam(3.0)).reward == doctest::Approx(-1.95));
  CHECK(vel_step(env, {2.0, true}, 1.0, TaskParam(2.0)).reward == doctest::Approx(1.04));
  CHECK(vel_step(env, {2.0, true}, 5.0, TaskParam(2.0)).reward == doctest::Approx(1.04));
  const VelStep s = vel_step(env, {0.0, true}, 1.0, TaskParam(0.0));
  CHECK(s.state.velocity == doctest::Approx(0.1));
  CHECK(vel_step(env, {1.0, false}, 0.0, TaskParam(1.0)).reward == doctest::Approx(1.0));
}

TEST_CASE("failing to run is irreversible") {
  EnvSpec env = EnvSpec::velocity(1.0);
  CHECK(env.velocity_limit == 2.0);
  VelState st{1.99, true};
  st = vel_step(env, st, 1.0, TaskParam(0.0)).state;
  st.velocity = 2.5;
  st = vel_step(env, st, 0.0, TaskParam(0.0)).state;
  CHECK_FALSE(st.alive);
  st.velocity = 0.0;
  CHECK_FALSE(vel_step(env, st, 0.0, TaskParam(0.0)).state.alive);
}

TEST_CASE("degenerate horizon gives an empty trajectory") {
  const EnvSpec env = EnvSpec::velocity(3.0);
  const PolicyArchitecture arch{1, 1, {4}};
  Rng rng(1);
  const PolicyParams theta = init_policy(arch, rng);
  const Trajectory t = rollout(env, arch, theta, TaskParam(1.0), 0, rng);
  CHECK(t.length() == 0);
  CHECK(t.total_reward() == 0.0);
}

TEST_CASE("stationary navigation agent") {
  const EnvSpec env = EnvSpec::navigation();
  const PolicyArchitecture arch{2, 2, {8, 8}};
  PolicyParams theta = PolicyParams::Zero(arch.param_count());
  theta.tail(2).setConstant(-10.0);
  Rng rng(2);
  const Trajectory t = rollout(env, arch, theta, TaskParam(1.0, 0.0), 100, rng);
  CHECK(t.length() == 100);
  CHECK(t.total_reward() == doctest::Approx(-100.0).epsilon(1e-3));
}

TEST_CASE("oracle velocity controller") {
  // Full throttle until the target is reached, then hold it.
  const EnvSpec env = EnvSpec::velocity(3.0);
  for (double target : {0.5, 1.0, 3.0}) {
    VelState st;
    double total = 0.0;
    for (int t = 0; t < 100; ++t) {
      const double hold = env.drag * target / env.gain;
      const double a = std::clamp(hold + (target - st.velocity) / (env.dt * env.gain), -1.0, 1.0);
      const VelStep s = vel_step(env, st, a, TaskParam(target));
      total += s.reward;
      st = s.state;
    }
    if (target <= 0.5) CHECK(total >= 100.0);
    MESSAGE("oracle total at v=" << target << ": " << total);
    if (target == 3.0) CHECK(st.velocity == doctest::Approx(3.0).epsilon(1e-6));
  }
}

TEST_CASE("zero policy reward decreases with the target") {
  const EnvSpec env = EnvSpec::velocity(3.0);
  const PolicyArchitecture arch{1, 1, {4}};
  PolicyParams theta = PolicyParams::Zero(arch.param_count());
  theta[arch.log_std_offset()] = -30.0;
  double prev = 1e9;
  for (double v = 0.0; v <= 5.0; v += 0.25) {
    Rng rng(1);
    const double r = rollout(env, arch, theta, TaskParam(v), 100, rng).total_reward();
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("rollouts are deterministic and batch-consistent") {
  const EnvSpec env = EnvSpec::velocity(3.0);
  const PolicyArchitecture arch{1, 1, {8, 8}};
  Rng init(5);
  const PolicyParams theta = init_policy(arch, init);
  Rng a(11), b(11), c(11);
  const Trajectory x = rollout(env, arch, theta, TaskParam(1.0), 50, a);
  const Trajectory y = rollout(env, arch, theta, TaskParam(1.0), 50, b);
  CHECK(x.rewards == y.rewards);
  const auto batch = rollout_batch(env, arch, theta, TaskParam(1.0), 50, 1, c);
  CHECK(batch.front().rewards == x.rewards);
  CHECK(batch.front().actions == x.actions);
}

TEST_CASE("non-finite parameters raise a run error naming the task") {
  const EnvSpec env = EnvSpec::velocity(3.0);
  const PolicyArchitecture arch{1, 1, {4}};
  PolicyParams theta = PolicyParams::Zero(arch.param_count());
  theta[arch.log_std_offset() - 1] = std::nan("");
  Rng rng(1);
  try {
    rollout(env, arch, theta, TaskParam(2.0), 10, rng);
    FAIL("expected RunError");
  } catch (const RunError& e) {
    CHECK(std::string(e.what()).find("step 0") != std::string::npos);
  }
  CHECK_THROWS_AS(rollout(env, arch, theta, TaskParam(1.0, 1.0), 10, rng), InputError);
}
