// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--work-dir DIR] [--reuse] [--only 1,2,...]
//
// Criteria 5-8 and 10 train full 200-epoch runs (about an hour on one core).
// --reuse loads finished seeds whose stored config matches exactly; runs are
// deterministic, so this only skips recomputation.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "gts/config.hpp"
#include "gts/format.hpp"
#include "gts/invariants.hpp"
#include "gts/runner.hpp"

namespace fs = std::filesystem;
using namespace gts;

namespace {

constexpr int kEpochs = 200;
const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

struct SeedRun {
  std::uint64_t seed = 0;
  SweepResult sweep;
  std::vector<std::pair<int, double>> sampled;  // (epoch, difficulty)
};

struct MethodRuns {
  ExperimentConfig config;
  std::vector<SeedRun> seeds;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::pair<int, double>> read_sampled(const fs::path& run_csv, std::size_t dim) {
  std::ifstream in(run_csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<int, double>> out;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
    const double x = parse_double(f[1]);
    const double d = dim == 2 ? std::hypot(x, parse_double(f[2])) : x;
    out.emplace_back(std::stoi(f[0]), d);
  }
  return out;
}

bool finished(const ExperimentConfig& c, std::uint64_t seed) {
  const fs::path dir = seed_directory(c, seed);
  return fs::exists(dir / "sweep.csv") && fs::exists(dir / "checkpoints" / "final.json") &&
         fs::exists(dir / "config.txt") && slurp(dir / "config.txt") == c.to_text();
}

MethodRuns train(ExperimentConfig c, bool reuse) {
  MethodRuns runs;
  runs.config = c;
  for (std::uint64_t seed : c.seeds) {
    const auto start = std::chrono::steady_clock::now();
    const bool cached = reuse && finished(c, seed);
    if (!cached) {
      fs::remove_all(seed_directory(c, seed));
      run_seed(c, seed);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "  " << to_string(c.env) << ' ' << to_string(c.method) << " seed " << seed
              << (cached ? " (reused)" : "") << ' ' << static_cast<int>(secs) << " s\n";
    const fs::path dir = seed_directory(c, seed);
    runs.seeds.push_back({seed, read_sweep_csv(dir / "sweep.csv", c.test_step),
                          read_sampled(dir / "run.csv", c.env_spec().task_dim())});
  }
  return runs;
}

// P(X >= k) for X ~ Binomial(n, 1/2).
double sign_test_p(int k, int n) {
  double p = 0.0;
  for (int i = k; i <= n; ++i) p += std::exp(std::lgamma(n + 1) - std::lgamma(i + 1) - std::lgamma(n - i + 1) - n * std::log(2.0));
  return p;
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fixed(double x, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

class Suite {
 public:
  Suite(fs::path work, bool reuse) : work_(std::move(work)), reuse_(reuse) {}

  Outcome c1() { return from(check_sampling_math()); }
  Outcome c2() { return from(check_region_schedule(200)); }
  Outcome c3() { return from(check_sampler_fidelity(100000)); }
  Outcome c4() { return from(check_policy_gradient(20)); }
  Outcome c9() { return from(check_bias_arithmetic()); }

  Outcome c5() {
    const MethodRuns& r = velocity(Method::rmrl_gts);
    const double hard = 2.0 / 3.0 * r.config.tau_max;
    double early_sum = 0.0, late_sum = 0.0;
    for (const auto& s : r.seeds) {
      int early = 0, early_hard = 0, late = 0, late_hard = 0;
      for (const auto& [epoch, d] : s.sampled) {
        if (epoch >= 1 && epoch <= 100) {
          ++early;
          early_hard += d > hard;
        }
        if (epoch >= 150 && epoch <= 200) {
          ++late;
          late_hard += d > hard;
        }
      }
      early_sum += static_cast<double>(early_hard) / early;
      late_sum += static_cast<double>(late_hard) / late;
    }
    const double n = static_cast<double>(r.seeds.size());
    const double early = early_sum / n, late = late_sum / n;
    return {early < 0.05 && late > 0.15,
            "fraction with difficulty > " + fixed(hard, 2) + ": epochs 1-100 " + fixed(early, 4) +
                " (< 0.05), epochs 150-200 " + fixed(late, 4) + " (> 0.15)"};
  }

  Outcome c6() {
    const MethodRuns& g = velocity(Method::rmrl_gts);
    const MethodRuns& u = velocity(Method::uniform_maml);
    const std::vector<TauRange> ranges{{0, 3}, {2, 3}};
    int wins_var = 0, wins_hard = 0, wins_neg = 0;
    std::ostringstream per;
    for (std::size_t i = 0; i < g.seeds.size(); ++i) {
      const auto sg = summarize(g.seeds[i].sweep, ranges, std::vector<double>{});
      const auto su = summarize(u.seeds[i].sweep, ranges, std::vector<double>{});
      const double ng = sg.min_negative_tau.value_or(INFINITY);
      const double nu = su.min_negative_tau.value_or(INFINITY);
      wins_var += sg.ranges[0].variance < su.ranges[0].variance;
      wins_hard += sg.ranges[1].mean > su.ranges[1].mean;
      wins_neg += ng > nu;
      per << " seed " << g.seeds[i].seed << ": var " << fixed(sg.ranges[0].variance, 1) << "/"
          << fixed(su.ranges[0].variance, 1) << " hard " << fixed(sg.ranges[1].mean, 1) << "/"
          << fixed(su.ranges[1].mean, 1) << " neg " << fixed(ng, 2) << "/" << fixed(nu, 2) << ";";
    }
    const int n = static_cast<int>(g.seeds.size());
    const double pa = sign_test_p(wins_var, n), pb = sign_test_p(wins_hard, n), pc = sign_test_p(wins_neg, n);
    std::ostringstream os;
    os << "sign tests (rmrl_gts/uniform_maml): (a) lower variance [0,3] " << wins_var << "/" << n << " p=" << fixed(pa, 4)
       << ", (b) higher mean [2,3] " << wins_hard << "/" << n << " p=" << fixed(pb, 4) << ", (c) larger negative-score tau "
       << wins_neg << "/" << n << " p=" << fixed(pc, 4) << ";" << per.str();
    return {pa < 0.05 && pb < 0.05 && pc < 0.05, os.str()};
  }

  Outcome c7() {
    auto hard_mean = [&](Method m) {
      const MethodRuns& r = velocity(m);
      std::vector<SweepResult> sweeps;
      for (const auto& s : r.seeds) sweeps.push_back(s.sweep);
      return summarize(average_sweeps(sweeps), std::vector<TauRange>{{2, 3}}, std::vector<double>{}).ranges[0].mean;
    };
    const double g = hard_mean(Method::rmrl_gts);
    const double a1 = hard_mean(Method::approach1_only);
    const double a2 = hard_mean(Method::approach2_only);
    return {g >= a2 && g >= a1, "seed-averaged mean over [2,3]: rmrl_gts " + fixed(g, 2) + ", approach1_only " +
                                    fixed(a1, 2) + ", approach2_only " + fixed(a2, 2)};
  }

  Outcome c8() {
    auto test_mean = [&](Method m) {
      const MethodRuns& r = navigation(m);
      std::vector<SweepResult> sweeps;
      for (const auto& s : r.seeds) sweeps.push_back(s.sweep);
      const TauRange whole{r.config.test_tau_min, r.config.test_tau_max};
      return summarize(average_sweeps(sweeps), std::vector<TauRange>{whole}, std::vector<double>{}).ranges[0].mean;
    };
    const double g = test_mean(Method::rmrl_gts);
    const double u = test_mean(Method::uniform_maml);
    return {g >= u, "seed-averaged mean post-adaptation score over |goal| <= 3: rmrl_gts " + fixed(g, 2) +
                        ", uniform_maml " + fixed(u, 2)};
  }

  Outcome c10() {
    ExperimentConfig c = velocity_config(Method::rmrl_gts);
    c.seeds = {1};
    c.workers = 2;
    const fs::path base = work_ / "determinism";
    fs::remove_all(base);
    c.output_dir = (base / "first").string();
    const SeedResult a = run_seed(c, 1);
    c.output_dir = (base / "second").string();
    const SeedResult b = run_seed(c, 1);
    c.output_dir = (base / "resumed").string();
    RunOptions stop;
    stop.stop_before_epoch = 120;
    const SeedResult part = run_seed(c, 1, stop);
    RunOptions resume;
    resume.resume_from = part.directory / "checkpoints" / "abort.json";
    const SeedResult r = run_seed(c, 1, resume);

    std::vector<std::string> diffs;
    for (const char* f : {"run.csv", "partitions.csv", "curves.csv", "sweep.csv", "summary.json"}) {
      if (slurp(a.directory / f) != slurp(b.directory / f)) diffs.push_back(std::string("repeat ") + f);
      if (slurp(a.directory / f) != slurp(r.directory / f)) diffs.push_back(std::string("resume ") + f);
    }
    if (a.theta != b.theta) diffs.push_back("repeat theta");
    if (a.theta != r.theta) diffs.push_back("resume theta");
    std::string detail = "2 workers, two full runs and a run resumed at epoch 120: ";
    if (diffs.empty()) {
      detail += "logs, sweeps and final parameters bit-identical";
    } else {
      detail += "differences in";
      for (const auto& d : diffs) detail += " " + d;
    }
    return {diffs.empty(), detail};
  }

 private:
  static Outcome from(const CheckResult& r) { return {r.passed, r.detail}; }

  ExperimentConfig velocity_config(Method m) const {
    ExperimentConfig c = ExperimentConfig::defaults(EnvKind::velocity1d);
    c.method = m;
    c.tau_min = 0.0;
    c.tau_max = 3.0;
    c.test_tau_min = 0.0;
    c.test_tau_max = 5.0;
    c.n_epoch = kEpochs;
    c.seeds = kSeeds;
    c.output_dir = (work_ / "velocity").string();
    return c;
  }

  const MethodRuns& velocity(Method m) {
    auto it = velocity_.find(m);
    if (it == velocity_.end()) it = velocity_.emplace(m, train(velocity_config(m), reuse_)).first;
    return it->second;
  }

  const MethodRuns& navigation(Method m) {
    auto it = navigation_.find(m);
    if (it == navigation_.end()) {
      ExperimentConfig c = ExperimentConfig::defaults(EnvKind::navigation2d);
      c.method = m;
      c.tau_min = 0.0;
      c.tau_max = 2.0;
      c.test_tau_min = 0.0;
      c.test_tau_max = 3.0;
      c.n_epoch = kEpochs;
      c.seeds = kSeeds;
      c.output_dir = (work_ / "navigation").string();
      it = navigation_.emplace(m, train(c, reuse_)).first;
    }
    return it->second;
  }

  fs::path work_;
  bool reuse_;
  std::map<Method, MethodRuns> velocity_;
  std::map<Method, MethodRuns> navigation_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string work = "acceptance_runs";
  bool reuse = false;
  std::vector<int> only;
  app.add_option("--work-dir", work, "directory for training runs");
  app.add_flag("--reuse", reuse, "load finished runs whose config matches");
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  Suite suite(work, reuse);
  const std::vector<std::pair<int, std::pair<std::string, std::function<Outcome()>>>> criteria{
      {1, {"sampling math exactness", [&] { return suite.c1(); }}},
      {2, {"region schedule end state", [&] { return suite.c2(); }}},
      {3, {"empirical sampler fidelity", [&] { return suite.c3(); }}},
      {4, {"meta-gradient correctness", [&] { return suite.c4(); }}},
      {5, {"curriculum sampling pattern", [&] { return suite.c5(); }}},
      {6, {"robustness direction", [&] { return suite.c6(); }}},
      {7, {"ablation ordering", [&] { return suite.c7(); }}},
      {8, {"2D navigation direction", [&] { return suite.c8(); }}},
      {9, {"metric fidelity", [&] { return suite.c9(); }}},
      {10, {"determinism and resumability", [&] { return suite.c10(); }}},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (const auto& [id, entry] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = entry.second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << id << " (" << entry.first << ", "
              << fixed(secs, 1) << " s): " << o.detail << std::endl;
    failed += !o.passed;
  }
  return failed == 0 ? 0 : 1;
}
