#include "metaprior/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

namespace metaprior {

Layout RunConfig::layout() const {
  return dense_layout({1, model_size, model_size, 1});
}

BORunConfig RunConfig::bo_config() const {
  BORunConfig bo;
  bo.shots = shots;
  bo.prior_kind = prior;
  bo.acquisition = acquisition;
  bo.kernel = kernel;
  bo.mc.sample_count = mc_samples;
  bo.mc.seed = seed;
  bo.eval_grid_size = eval_grid_size;
  bo.observation_noise_var = tasks.noise_var;
  bo.seed = seed;
  return bo;
}

RunConfig default_config() { return RunConfig{}; }

namespace {

Scalar parse_scalar(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const Scalar v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("config: bad number for " + key + ": '" + value + "'");
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw ConfigError("config: bad flag for " + key + ": '" + value + "'");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_scalar(Scalar v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // prefer the shortest representation that still round-trips
  for (int prec = 1; prec <= 16; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "seed") {
    cfg.seed = parse_u64(key, value);
    cfg.reptile.seed = cfg.seed;
  } else if (key == "workers") {
    cfg.workers = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "verbosity") {
    cfg.verbosity = static_cast<int>(parse_int(key, value));
  } else if (key == "sample_radius") {
    cfg.tasks.boundary.radius = parse_scalar(key, value);
  } else if (key == "std_min") {
    cfg.tasks.std_min = parse_scalar(key, value);
  } else if (key == "std_max") {
    cfg.tasks.std_max = parse_scalar(key, value);
  } else if (key == "noise_var") {
    cfg.tasks.noise_var = parse_scalar(key, value);
  } else if (key == "model_size") {
    cfg.model_size = parse_int(key, value);
  } else if (key == "inner_step") {
    cfg.reptile.inner_step = parse_scalar(key, value);
  } else if (key == "inner_batch") {
    cfg.reptile.inner_batch = parse_int(key, value);
  } else if (key == "inner_iters") {
    cfg.reptile.inner_iters = parse_int(key, value);
  } else if (key == "outer_step") {
    cfg.reptile.outer_step = parse_scalar(key, value);
  } else if (key == "outer_iters") {
    cfg.reptile.outer_iters = parse_int(key, value);
  } else if (key == "meta_batch") {
    cfg.reptile.meta_batch = parse_int(key, value);
  } else if (key == "kernel_amplitude") {
    cfg.kernel.amplitude = parse_scalar(key, value);
  } else if (key == "kernel_length_scale") {
    cfg.kernel.length_scales = {parse_scalar(key, value)};
  } else if (key == "kernel_noise_var") {
    cfg.kernel.noise_var = parse_scalar(key, value);
  } else if (key == "acquisition") {
    cfg.acquisition = acquisition_from_string(value);
  } else if (key == "mc_samples") {
    cfg.mc_samples = parse_int(key, value);
  } else if (key == "prior_grid") {
    cfg.prior_grid = parse_int(key, value);
  } else if (key == "eval_grid_size") {
    cfg.eval_grid_size = parse_int(key, value);
  } else if (key == "shots") {
    cfg.shots = parse_int(key, value);
  } else if (key == "prior") {
    cfg.prior = prior_kind_from_string(value);
  } else if (key == "eval_iterations") {
    cfg.eval_iterations = parse_int(key, value);
  } else if (key == "eval_batch") {
    cfg.eval_batch = parse_int(key, value);
  } else if (key == "eval_std_normal") {
    cfg.eval_std_normal = parse_bool(key, value);
  } else if (key == "progress_every") {
    cfg.progress_every = parse_int(key, value);
  } else if (key == "checkpoint_every") {
    cfg.checkpoint_every = parse_int(key, value);
  } else if (key == "checkpoint_in") {
    cfg.checkpoint_in = value;
  } else if (key == "checkpoint_out") {
    cfg.checkpoint_out = value;
  } else if (key == "results_out") {
    cfg.results_out = value;
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file: " + path.string());

  RunConfig cfg = default_config();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: " + path.string() + ":" +
                        std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config: " + path.string() + ":" +
                        std::to_string(lineno) + ": empty key");
    }
    apply_override(cfg, key, value);
  }
  return cfg;
}

std::vector<std::pair<std::string, std::string>> semantic_entries(
    const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("seed", std::to_string(cfg.seed));
  kv.emplace_back("sample_radius", format_scalar(cfg.tasks.boundary.radius));
  kv.emplace_back("std_min", format_scalar(cfg.tasks.std_min));
  kv.emplace_back("std_max", format_scalar(cfg.tasks.std_max));
  kv.emplace_back("noise_var", format_scalar(cfg.tasks.noise_var));
  kv.emplace_back("model_size", std::to_string(cfg.model_size));
  kv.emplace_back("inner_step", format_scalar(cfg.reptile.inner_step));
  kv.emplace_back("inner_batch", std::to_string(cfg.reptile.inner_batch));
  kv.emplace_back("inner_iters", std::to_string(cfg.reptile.inner_iters));
  kv.emplace_back("outer_step", format_scalar(cfg.reptile.outer_step));
  kv.emplace_back("outer_iters", std::to_string(cfg.reptile.outer_iters));
  kv.emplace_back("meta_batch", std::to_string(cfg.reptile.meta_batch));
  kv.emplace_back("kernel_amplitude", format_scalar(cfg.kernel.amplitude));
  kv.emplace_back("kernel_length_scale",
                  format_scalar(cfg.kernel.length_scales.at(0)));
  kv.emplace_back("kernel_noise_var", format_scalar(cfg.kernel.noise_var));
  kv.emplace_back("acquisition", to_string(cfg.acquisition));
  kv.emplace_back("mc_samples", std::to_string(cfg.mc_samples));
  kv.emplace_back("prior_grid", std::to_string(cfg.prior_grid));
  kv.emplace_back("eval_grid_size", std::to_string(cfg.eval_grid_size));
  kv.emplace_back("shots", std::to_string(cfg.shots));
  kv.emplace_back("prior", to_string(cfg.prior));
  kv.emplace_back("eval_iterations", std::to_string(cfg.eval_iterations));
  kv.emplace_back("eval_batch", std::to_string(cfg.eval_batch));
  kv.emplace_back("eval_std_normal", cfg.eval_std_normal ? "1" : "0");
  return kv;
}

}  // namespace metaprior
