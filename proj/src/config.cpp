#include "gts/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gts/error.hpp"
#include "gts/format.hpp"

namespace gts {

const char* to_string(Method m) {
  switch (m) {
    case Method::rmrl_gts: return "rmrl_gts";
    case Method::approach1_only: return "approach1_only";
    case Method::approach2_only: return "approach2_only";
    case Method::uniform_maml: return "uniform_maml";
  }
  return "?";
}

Method method_from_string(const std::string& text) {
  for (auto m : {Method::rmrl_gts, Method::approach1_only, Method::approach2_only,
                 Method::uniform_maml})
    if (text == to_string(m)) return m;
  throw ConfigError("unknown method '" + text + "'");
}

bool uses_regions(Method m) { return m == Method::rmrl_gts || m == Method::approach1_only; }
bool uses_scores(Method m) { return m == Method::rmrl_gts || m == Method::approach2_only; }

ExperimentConfig ExperimentConfig::defaults(EnvKind env) {
  ExperimentConfig c;
  c.env = env;
  if (env == EnvKind::navigation2d) {
    c.tau_min = 0.0;
    c.tau_max = 2.0;
    c.n_batch = 20;
    c.test_tau_min = 0.0;
    c.test_tau_max = 3.0;
  }
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean '" + text + "' for key '" + key + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(key, item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) out += format_double(items[i]);
    else out += std::to_string(items[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }

  EnvKind env = EnvKind::velocity1d;
  for (const auto& [k, v] : entries)
    if (k == "env") {
      try {
        env = env_kind_from_string(v);
      } catch (const InputError& e) {
        throw ConfigError(e.what());
      }
    }
  ExperimentConfig c = defaults(env);

  for (const auto& [k, v] : entries) {
    if (k == "env") continue;
    else if (k == "method") c.method = method_from_string(v);
    else if (k == "tau_min") c.tau_min = parse_number<double>(k, v);
    else if (k == "tau_max") c.tau_max = parse_number<double>(k, v);
    else if (k == "n_epoch") c.n_epoch = parse_number<int>(k, v);
    else if (k == "n_batch") c.n_batch = parse_number<int>(k, v);
    else if (k == "n_samples") c.n_samples = parse_number<int>(k, v);
    else if (k == "n_interval") c.n_interval = parse_number<int>(k, v);
    else if (k == "d_tau_bin") c.d_tau_bin = parse_number<double>(k, v);
    else if (k == "delta") c.delta = parse_number<double>(k, v);
    else if (k == "alpha") c.alpha = parse_number<double>(k, v);
    else if (k == "beta") c.beta = parse_number<double>(k, v);
    else if (k == "gamma") c.gamma = parse_number<double>(k, v);
    else if (k == "horizon") c.horizon = parse_number<int>(k, v);
    else if (k == "seeds") c.seeds = parse_list<std::uint64_t>(k, v);
    else if (k == "test_tau_min") c.test_tau_min = parse_number<double>(k, v);
    else if (k == "test_tau_max") c.test_tau_max = parse_number<double>(k, v);
    else if (k == "test_step") c.test_step = parse_number<double>(k, v);
    else if (k == "output_dir") c.output_dir = v;
    else if (k == "hidden") c.hidden = parse_list<int>(k, v);
    else if (k == "init_log_std") c.init_log_std = parse_number<double>(k, v);
    else if (k == "grad_clip") c.grad_clip = parse_number<double>(k, v);
    else if (k == "workers") c.workers = parse_number<int>(k, v);
    else if (k == "checkpoint_every") c.checkpoint_every = parse_number<int>(k, v);
    else if (k == "bias_points") c.bias_points = parse_list<double>(k, v);
    else if (k == "dump_curves") c.dump_curves = parse_bool(k, v);
    else if (k == "summary_ranges") {
      c.summary_ranges.clear();
      for (const auto& item : split(v, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw ConfigError("summary_ranges items look like lo:hi");
        c.summary_ranges.push_back({parse_number<double>(k, parts[0]), parse_number<double>(k, parts[1])});
      }
    } else {
      throw ConfigError("unknown key '" + k + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  os << "env = " << to_string(env) << '\n'
     << "method = " << to_string(method) << '\n'
     << "tau_min = " << format_double(tau_min) << '\n'
     << "tau_max = " << format_double(tau_max) << '\n'
     << "n_epoch = " << n_epoch << '\n'
     << "n_batch = " << n_batch << '\n'
     << "n_samples = " << n_samples << '\n'
     << "n_interval = " << n_interval << '\n'
     << "d_tau_bin = " << format_double(d_tau_bin) << '\n'
     << "delta = " << format_double(delta) << '\n'
     << "alpha = " << format_double(alpha) << '\n'
     << "beta = " << format_double(beta) << '\n'
     << "gamma = " << format_double(gamma) << '\n'
     << "horizon = " << horizon << '\n'
     << "seeds = " << join(seeds) << '\n'
     << "test_tau_min = " << format_double(test_tau_min) << '\n'
     << "test_tau_max = " << format_double(test_tau_max) << '\n'
     << "test_step = " << format_double(test_step) << '\n'
     << "output_dir = " << output_dir << '\n'
     << "hidden = " << join(hidden) << '\n'
     << "init_log_std = " << format_double(init_log_std) << '\n'
     << "grad_clip = " << format_double(grad_clip) << '\n'
     << "workers = " << workers << '\n'
     << "checkpoint_every = " << checkpoint_every << '\n'
     << "dump_curves = " << (dump_curves ? "true" : "false") << '\n';
  os << "summary_ranges = ";
  const auto ranges = resolved_ranges();
  for (std::size_t i = 0; i < ranges.size(); ++i)
    os << (i ? ", " : "") << format_double(ranges[i].lo) << ':' << format_double(ranges[i].hi);
  os << '\n' << "bias_points = " << join(resolved_bias_points()) << '\n';
  return os.str();
}

void ExperimentConfig::validate() const {
  try {
    (void)train_bounds();
    (void)test_bounds();
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  if (env == EnvKind::navigation2d && tau_min < 0.0)
    throw ConfigError("navigation bounds are radial and must be non-negative");
  if (n_epoch < 1) throw ConfigError("n_epoch must be positive");
  if (n_batch < 2) throw ConfigError("n_batch must be at least 2");
  if (n_samples < 1) throw ConfigError("n_samples must be positive");
  if (n_interval < 1) throw ConfigError("n_interval must be positive");
  if (!(d_tau_bin > 0.0)) throw ConfigError("d_tau_bin must be positive");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in [0,1]");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("step sizes must be non-negative");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0,1]");
  if (horizon < 1) throw ConfigError("horizon must be positive");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (!(test_step > 0.0)) throw ConfigError("test_step must be positive");
  if (hidden.empty()) throw ConfigError("hidden needs at least one layer width");
  for (int h : hidden)
    if (h < 1) throw ConfigError("hidden widths must be positive");
  if (workers < 1) throw ConfigError("workers must be positive");
  if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir must be set");
}

TaskSpace ExperimentConfig::task_space() const {
  const EnvSpec spec = env_spec();
  return {train_bounds(), spec.coordinate(), spec.task_dim()};
}

EnvSpec ExperimentConfig::env_spec() const {
  EnvSpec spec = env == EnvKind::navigation2d ? EnvSpec::navigation() : EnvSpec::velocity(tau_max);
  spec.horizon = horizon;
  return spec;
}

MetaConfig ExperimentConfig::meta() const {
  MetaConfig m;
  m.alpha = alpha;
  m.beta = beta;
  m.n_samples = n_samples;
  m.horizon = horizon;
  m.gamma = gamma;
  m.grad_clip = grad_clip;
  m.workers = workers;
  return m;
}

SamplerConfig ExperimentConfig::sampler() const { return {n_batch, delta, d_tau_bin}; }

PolicyArchitecture ExperimentConfig::architecture() const {
  const EnvSpec spec = env_spec();
  return {spec.obs_dim(), spec.act_dim(), hidden};
}

std::vector<TauRange> ExperimentConfig::resolved_ranges() const {
  if (!summary_ranges.empty()) return summary_ranges;
  std::vector<TauRange> r{{tau_min, tau_max}};
  if (test_tau_min != tau_min || test_tau_max != tau_max) r.push_back({test_tau_min, test_tau_max});
  return r;
}

std::vector<double> ExperimentConfig::resolved_bias_points() const {
  if (!bias_points.empty()) return bias_points;
  std::vector<double> pts;
  for (double t = std::ceil(std::max(tau_min, test_tau_min)); t <= tau_max + 1e-12; t += 1.0)
    pts.push_back(t);
  return pts;
}

}  // namespace gts
