#include "gts/runner.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gts/error.hpp"
#include "gts/format.hpp"
#include "gts/guided_sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gts {

namespace {

constexpr int kCheckpointVersion = 1;
constexpr std::uint64_t kSamplerStream = 0x5a3b1e;
constexpr std::uint64_t kRolloutStream = 0x40a11;
constexpr std::uint64_t kSweepStream = 0x5eeb;
constexpr std::uint64_t kInitStream = 0x1417;

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(line);
  while (std::getline(is, item, ',')) out.push_back(item);
  return out;
}

// Keeps the header and the rows logged before `epoch`.
void truncate_log(const fs::path& path, int epoch) {
  std::ifstream in(path);
  if (!in) return;
  std::vector<std::string> kept;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      kept.push_back(line);
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    if (std::stoi(line.substr(0, comma)) < epoch) kept.push_back(line);
  }
  in.close();
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : kept) out << l << '\n';
}

std::ofstream open_log(const fs::path& path, const std::string& header, bool fresh) {
  if (fresh || !fs::exists(path)) {
    std::ofstream out(path, std::ios::trunc);
    out << header << '\n';
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw RunError("cannot write " + path.string());
  return out;
}

std::string task_columns(std::size_t dim) { return dim == 2 ? "task_0,task_1" : "task_0"; }

std::string format_task(const TaskParam& t) {
  std::string s = format_double(t[0]);
  if (t.dim() == 2) s += "," + format_double(t[1]);
  return s;
}

}  // namespace

json checkpoint_to_json(const ExperimentConfig& config, const RunState& state) {
  const PolicyArchitecture arch = config.architecture();
  json j;
  j["format"] = "gts-checkpoint";
  j["version"] = kCheckpointVersion;
  j["architecture"] = {{"obs_dim", arch.obs_dim}, {"act_dim", arch.act_dim}, {"hidden", arch.hidden}};
  j["theta"] = to_vector(state.theta.head(arch.log_std_offset()));
  j["log_std"] = to_vector(state.theta.tail(arch.act_dim));
  j["epoch"] = state.next_epoch;
  j["seed"] = state.seed;
  j["rng_state"] = serialize_rng(state.sampler_rng);
  j["config"] = config.to_text();
  j["tau_mean"] = state.tau_mean ? json(*state.tau_mean) : json(nullptr);
  if (state.partition) {
    j["partition"] = {{"tau_middle1", state.partition->tau_middle1},
                      {"tau_middle2", state.partition->tau_middle2}};
  } else {
    j["partition"] = nullptr;
  }
  json records = json::array();
  for (const auto& r : state.table.records()) {
    std::vector<double> tau(r.tau.values().begin(), r.tau.values().end());
    records.push_back({{"tau", tau}, {"coordinate", r.coordinate}, {"epoch", r.epoch}, {"r_mean", r.r_mean}});
  }
  j["scores"] = std::move(records);
  return j;
}

RunState checkpoint_from_json(const json& j, const ExperimentConfig& config) {
  if (j.value("format", "") != "gts-checkpoint") throw InputError("not a checkpoint file");
  if (j.at("version").get<int>() != kCheckpointVersion)
    throw InputError("unsupported checkpoint version " + j.at("version").dump());
  const PolicyArchitecture arch = config.architecture();
  const PolicyArchitecture stored{j.at("architecture").at("obs_dim").get<int>(),
                                  j.at("architecture").at("act_dim").get<int>(),
                                  j.at("architecture").at("hidden").get<std::vector<int>>()};
  if (!(stored == arch)) throw InputError("checkpoint architecture does not match the config");

  RunState state;
  state.seed = j.at("seed").get<std::uint64_t>();
  state.next_epoch = j.at("epoch").get<int>();
  const auto theta = j.at("theta").get<std::vector<double>>();
  const auto log_std = j.at("log_std").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(theta.size()) != arch.log_std_offset() ||
      static_cast<int>(log_std.size()) != arch.act_dim)
    throw InputError("checkpoint parameter vector has the wrong length");
  state.theta.resize(arch.param_count());
  state.theta.head(arch.log_std_offset()) = from_vector(theta);
  state.theta.tail(arch.act_dim) = from_vector(log_std);
  state.sampler_rng = deserialize_rng(j.at("rng_state").get<std::string>());
  state.table = ScoreTable(config.train_bounds(), config.d_tau_bin);
  for (const auto& r : j.at("scores")) {
    state.table.add({TaskParam::from_values(r.at("tau").get<std::vector<double>>()),
                     r.at("coordinate").get<double>(), r.at("epoch").get<int>(),
                     r.at("r_mean").get<double>()});
  }
  if (!j.at("tau_mean").is_null()) {
    state.tau_mean = j.at("tau_mean").get<double>();
    state.schedule = make_schedule(config.n_epoch, config.n_interval, config.train_bounds(), *state.tau_mean);
  }
  if (!j.at("partition").is_null()) {
    state.partition = make_partition(j["partition"].at("tau_middle1").get<double>(),
                                     j["partition"].at("tau_middle2").get<double>(),
                                     config.train_bounds());
  }
  return state;
}

void write_checkpoint(const fs::path& path, const ExperimentConfig& config, const RunState& state) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw RunError("cannot write checkpoint " + path.string());
    out << checkpoint_to_json(config, state).dump() << '\n';
  }
  fs::rename(tmp, path);
}

std::pair<ExperimentConfig, RunState> read_checkpoint(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read checkpoint " + path.string());
  try {
    json j;
    in >> j;
    if (j.value("format", "") != "gts-checkpoint") throw InputError("not a checkpoint file");
    ExperimentConfig config = ExperimentConfig::parse(j.at("config").get<std::string>());
    RunState state = checkpoint_from_json(j, config);
    return {std::move(config), std::move(state)};
  } catch (const json::exception& e) {
    throw InputError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

fs::path seed_directory(const ExperimentConfig& config, std::uint64_t seed) {
  return fs::path(config.output_dir) / to_string(config.method) / std::to_string(seed);
}

void write_sweep_csv(const fs::path& path, const SweepResult& sweep) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw RunError("cannot write " + path.string());
  const std::size_t dim = sweep.entries.empty() ? 1 : sweep.entries.front().task.dim();
  const std::size_t seeds = sweep.entries.empty() ? 0 : sweep.entries.front().per_seed_post.size();
  out << (dim == 2 ? "tau_0,tau_1" : "tau_0") << ",pre,post";
  for (std::size_t s = 0; s < seeds; ++s) out << ",post_seed_" << s;
  out << '\n';
  for (const auto& e : sweep.entries) {
    out << format_task(e.task) << ',' << format_double(e.pre) << ',' << format_double(e.post);
    for (double p : e.per_seed_post) out << ',' << format_double(p);
    out << '\n';
  }
}

SweepResult read_sweep_csv(const fs::path& path, double step) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  const auto header = split_csv(line);
  const std::size_t dim = header.size() >= 2 && header[1] == "tau_1" ? 2 : 1;
  if (header.size() < dim + 2) throw InputError("malformed sweep header in " + path.string());
  SweepResult sweep;
  sweep.step = step;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() < dim + 2) throw InputError("malformed sweep row in " + path.string());
    SweepEntry e;
    e.task = dim == 2 ? TaskParam(parse_double(f[0]), parse_double(f[1])) : TaskParam(parse_double(f[0]));
    e.coordinate = difficulty(dim == 2 ? DifficultyCoordinate::radial : DifficultyCoordinate::identity, e.task);
    e.pre = parse_double(f[dim]);
    e.post = parse_double(f[dim + 1]);
    for (std::size_t k = dim + 2; k < f.size(); ++k) e.per_seed_post.push_back(parse_double(f[k]));
    sweep.entries.push_back(std::move(e));
  }
  sweep.validate();
  return sweep;
}

namespace {

class SeedRunner {
 public:
  SeedRunner(const ExperimentConfig& config, std::uint64_t seed, const RunOptions& options)
      : config_(config),
        options_(options),
        space_(config.task_space()),
        arch_(config.architecture()),
        meta_(config.meta()),
        objective_(config.env_spec(), arch_, config.n_samples, config.horizon, config.gamma),
        dir_(seed_directory(config, seed)) {
    config_.validate();
    state_.seed = seed;
    state_.table = ScoreTable(config.train_bounds(), config.d_tau_bin);
  }

  SeedResult run() {
    fs::create_directories(dir_ / "checkpoints");
    {
      std::ofstream echo(dir_ / "config.txt", std::ios::trunc);
      echo << config_.to_text();
    }
    const bool fresh = !options_.resume_from;
    if (fresh) {
      Rng init(derive_seed(state_.seed, {kInitStream}));
      state_.theta = init_policy(arch_, init, config_.init_log_std);
      state_.sampler_rng = Rng(derive_seed(state_.seed, {kSamplerStream}));
    } else {
      auto [stored_config, stored] = read_checkpoint(*options_.resume_from);
      if (stored.seed != state_.seed) throw InputError("checkpoint belongs to another seed");
      if (stored_config.method != config_.method) throw InputError("checkpoint belongs to another method");
      state_ = std::move(stored);
      for (const char* name : {"run.csv", "partitions.csv", "curves.csv", "timing.csv"})
        truncate_log(dir_ / name, state_.next_epoch);
    }
    run_log_ = open_log(dir_ / "run.csv", "epoch," + task_columns(space_.dim) + ",region,r_mean", fresh);
    if (uses_regions(config_.method))
      partition_log_ = open_log(dir_ / "partitions.csv", "epoch,tau_middle1,tau_middle2", fresh);
    if (uses_scores(config_.method) && config_.dump_curves)
      curve_log_ = open_log(dir_ / "curves.csv", "epoch,bin_center,f_bar,p", fresh);
    timing_log_ = open_log(dir_ / "timing.csv", "epoch,wall_seconds", fresh);

    SeedResult result;
    result.seed = state_.seed;
    result.directory = dir_;
    for (int epoch = state_.next_epoch; epoch < config_.n_epoch; ++epoch) {
      if (options_.stop_before_epoch && epoch >= *options_.stop_before_epoch) {
        write_checkpoint(dir_ / "checkpoints" / "abort.json", config_, state_);
        result.theta = state_.theta;
        return result;
      }
      try {
        result.log.epochs.push_back(run_epoch(epoch));
      } catch (const RunError&) {
        write_checkpoint(dir_ / "checkpoints" / "abort.json", config_, state_);
        throw;
      }
    }
    write_checkpoint(dir_ / "checkpoints" / "final.json", config_, state_);
    result.theta = state_.theta;
    result.finished = true;

    if (options_.evaluate) {
      SweepResult sweep = evaluate_sweep(state_.theta, objective_, space_.coord, config_.test_bounds(),
                                         config_.test_step, meta_, derive_seed(state_.seed, {kSweepStream}));
      write_sweep_csv(dir_ / "sweep.csv", sweep);
      const auto ranges = config_.resolved_ranges();
      const auto points = config_.resolved_bias_points();
      RobustnessSummary summary = summarize(sweep, ranges, points);
      std::ofstream(dir_ / "summary.json", std::ios::trunc) << summary.to_json(config_.symbol()).dump(2) << '\n';
      result.sweep = std::move(sweep);
      result.summary = std::move(summary);
    }
    return result;
  }

 private:
  SamplingPlan plan(int epoch) {
    const Method method = config_.method;
    const SamplerConfig sampler = config_.sampler();
    Rng& rng = state_.sampler_rng;
    if (method == Method::uniform_maml)
      return sample_uniform(space_.bounds, config_.n_batch, space_.coord, rng);
    if (epoch == 0) return epoch0_grid(space_, config_.n_batch, rng);
    if (method == Method::approach1_only)
      return sample_regions_uniform(*state_.partition, sampler, space_.coord, rng);

    const ScoreCurve curve = build_curve(state_.table);
    const BinDistribution dist = probability(curve);
    if (curve_log_.is_open())
      for (std::size_t k = 0; k < curve.centers.size(); ++k)
        curve_log_ << epoch << ',' << format_double(curve.centers[k]) << ','
                   << format_double(curve.normalized[k]) << ',' << format_double(dist.probs[k]) << '\n';
    const RegionPartition partition =
        method == Method::rmrl_gts ? *state_.partition : whole_range_partition(space_.bounds);
    return sample_batch(partition, dist, sampler, space_.coord, rng);
  }

  void log_partition(int epoch, const RegionPartition& p) {
    partition_log_ << epoch << ',' << format_double(p.tau_middle1) << ','
                   << format_double(p.tau_middle2) << '\n';
  }

  EpochRecord run_epoch(int epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochRecord record;
    record.epoch = epoch;
    const bool regions = uses_regions(config_.method);

    std::optional<RegionPartition> changed;
    if (regions && epoch > 0 && state_.partition && state_.schedule &&
        is_change_epoch(*state_.schedule, epoch)) {
      state_.partition = advance(*state_.partition, *state_.schedule, epoch);
      changed = state_.partition;
    }

    SamplingPlan batch = plan(epoch);
    batch.epoch = epoch;
    MetaUpdate update = meta_update(state_.theta, batch, meta_, objective_,
                                    derive_seed(state_.seed, {kRolloutStream, static_cast<std::uint64_t>(epoch)}));
    state_.theta = std::move(update.theta);
    for (const auto& s : update.scores) {
      state_.table.add({s.task, s.coordinate, epoch, s.r_mean});
      run_log_ << epoch << ',' << format_task(s.task) << ',' << to_string(s.label) << ','
               << format_double(s.r_mean) << '\n';
    }

    if (regions && epoch == 0) {
      std::vector<ScoredTask> scored;
      for (const auto& s : update.scores) scored.push_back({s.task, s.r_mean});
      state_.tau_mean = estimate_tau_mean(scored, space_.coord);
      state_.schedule = make_schedule(config_.n_epoch, config_.n_interval, space_.bounds, *state_.tau_mean);
      state_.partition = initial_partition(*state_.tau_mean, *state_.schedule, space_.bounds);
      changed = state_.partition;
    }
    if (changed) log_partition(epoch, *changed);
    record.partition = changed;
    record.scores = std::move(update.scores);
    state_.next_epoch = epoch + 1;

    record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    timing_log_ << epoch << ',' << format_double(record.wall_seconds) << '\n';
    for (auto* log : {&run_log_, &partition_log_, &curve_log_, &timing_log_})
      if (log->is_open()) log->flush();

    if (state_.next_epoch % config_.checkpoint_every == 0 && state_.next_epoch < config_.n_epoch) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%04d.json", state_.next_epoch);
      write_checkpoint(dir_ / "checkpoints" / name, config_, state_);
    }
    if (options_.verbose) {
      double mean = 0.0;
      for (const auto& s : record.scores) mean += s.r_mean;
      mean /= static_cast<double>(record.scores.size());
      std::cerr << to_string(config_.method) << " seed " << state_.seed << " epoch " << epoch
                << " mean r " << mean << '\n';
    }
    return record;
  }

  ExperimentConfig config_;
  RunOptions options_;
  TaskSpace space_;
  PolicyArchitecture arch_;
  MetaConfig meta_;
  RolloutObjective objective_;
  fs::path dir_;
  RunState state_;
  std::ofstream run_log_;
  std::ofstream partition_log_;
  std::ofstream curve_log_;
  std::ofstream timing_log_;
};

}  // namespace

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, const RunOptions& options) {
  return SeedRunner(config, seed, options).run();
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  ExperimentResult result;
  std::vector<SweepResult> sweeps;
  for (std::uint64_t seed : config.seeds) {
    result.seeds.push_back(run_seed(config, seed, options));
    if (result.seeds.back().sweep) sweeps.push_back(*result.seeds.back().sweep);
  }
  if (!sweeps.empty() && sweeps.size() == config.seeds.size()) {
    SweepResult mean = average_sweeps(sweeps);
    const fs::path method_dir = fs::path(config.output_dir) / to_string(config.method);
    write_sweep_csv(method_dir / "sweep_mean.csv", mean);
    const auto ranges = config.resolved_ranges();
    const auto points = config.resolved_bias_points();
    RobustnessSummary summary = summarize(mean, ranges, points);
    std::ofstream(method_dir / "summary_mean.json", std::ios::trunc)
        << summary.to_json(config.symbol()).dump(2) << '\n';
    result.mean_sweep = std::move(mean);
    result.mean_summary = std::move(summary);
  }
  return result;
}

SweepResult load_run_sweeps(const fs::path& dir, ExperimentConfig* config_out) {
  std::vector<fs::path> seed_dirs;
  if (fs::exists(dir / "sweep.csv")) {
    seed_dirs.push_back(dir);
  } else if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_directory() && fs::exists(entry.path() / "sweep.csv")) seed_dirs.push_back(entry.path());
    std::sort(seed_dirs.begin(), seed_dirs.end());
  }
  if (seed_dirs.empty()) throw InputError("no sweep.csv found under " + dir.string());
  const ExperimentConfig config = ExperimentConfig::load(seed_dirs.front() / "config.txt");
  std::vector<SweepResult> sweeps;
  for (const auto& d : seed_dirs) sweeps.push_back(read_sweep_csv(d / "sweep.csv", config.test_step));
  if (config_out) *config_out = config;
  return average_sweeps(sweeps);
}

json compare_sweeps(const SweepResult& a, const SweepResult& b, std::span<const TauRange> ranges,
                    std::span<const double> bias_points, const std::string& symbol) {
  if (a.entries.size() != b.entries.size()) throw InputError("sweeps cover different task grids");
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    if (std::abs(a.entries[i].coordinate - b.entries[i].coordinate) > 1e-9)
      throw InputError("sweeps cover different task grids");

  const json sa = summarize(a, ranges, bias_points).to_json(symbol);
  const json sb = summarize(b, ranges, bias_points).to_json(symbol);
  json deltas = json::object();
  for (const auto& [key, value] : sa.items())
    if (value.is_number() && sb.at(key).is_number())
      deltas[key] = value.get<double>() - sb.at(key).get<double>();
  json per_tau = json::array();
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    per_tau.push_back({{"tau", a.entries[i].coordinate},
                       {"a", a.entries[i].post},
                       {"b", b.entries[i].post},
                       {"delta", a.entries[i].post - b.entries[i].post}});
  return {{"a", sa}, {"b", sb}, {"summary_delta", deltas}, {"tau_delta", per_tau}};
}

json compare_runs(const fs::path& dir_a, const fs::path& dir_b) {
  ExperimentConfig ca;
  ExperimentConfig cb;
  const SweepResult a = load_run_sweeps(dir_a, &ca);
  const SweepResult b = load_run_sweeps(dir_b, &cb);
  if (ca.env != cb.env || ca.test_tau_min != cb.test_tau_min || ca.test_tau_max != cb.test_tau_max)
    throw InputError("runs use different environments or test bounds");
  const auto ranges = ca.resolved_ranges();
  const auto points = ca.resolved_bias_points();
  json report = compare_sweeps(a, b, ranges, points, ca.symbol());
  report["a_dir"] = dir_a.string();
  report["b_dir"] = dir_b.string();
  return report;
}

}  // namespace gts
