// Command-line front end: meta-training, k-shot evaluation, prior export,
// and single optimization traces. See README.md for the file formats.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "metaprior/bo.hpp"
#include "metaprior/checkpoint.hpp"
#include "metaprior/config.hpp"
#include "metaprior/math.hpp"
#include "metaprior/reptile.hpp"

namespace {

using namespace metaprior;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitCheckpoint = 4;

struct CliArgs {
  std::string config_path;
  std::vector<std::string> sets;  // repeated key=value overrides
  std::string checkpoint_path;
  std::string out_path;
  std::string only_prior;  // eval: restrict to a single prior kind
  double task_mean = 0.0;
  double task_std = 1.0;
};

// Precedence: defaults < config file < METAPRIOR_SEED < --set/--flags.
RunConfig resolve_config(const CliArgs& args) {
  RunConfig cfg = args.config_path.empty()
                      ? default_config()
                      : parse_config_file(args.config_path);
  if (const char* env_seed = std::getenv("METAPRIOR_SEED")) {
    apply_override(cfg, "seed", env_seed);
  }
  for (const std::string& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    }
    apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void write_preamble(std::ostream& out, const RunConfig& cfg) {
  for (const auto& [key, value] : semantic_entries(cfg)) {
    out << "# " << key << "=" << value << "\n";
  }
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j;
  for (const auto& [key, value] : semantic_entries(cfg)) j[key] = value;
  return j;
}

std::string sibling_json_path(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  if (dot != std::string::npos && csv_path.substr(dot) == ".csv") {
    return csv_path.substr(0, dot) + ".json";
  }
  return csv_path + ".json";
}

WeightVector weights_from_checkpoint(const Checkpoint& ckpt) {
  return WeightVector{ckpt.layout, ckpt.weights};
}

int cmd_train(const CliArgs& args) {
  const RunConfig cfg = resolve_config(args);
  validate(cfg.reptile);
  validate(cfg.tasks);

  TrainHooks hooks;
  hooks.progress_every = cfg.progress_every;
  if (cfg.verbosity >= 1 && cfg.progress_every > 0) {
    hooks.on_progress = [](Index iter, Scalar loss) {
      std::cout << "iter=" << iter << " mean_inner_loss=" << format_scalar(loss)
                << "\n";
    };
  }
  hooks.checkpoint_every = cfg.checkpoint_every;
  hooks.on_checkpoint = [&cfg](const MetaState& state) {
    save_checkpoint(cfg.checkpoint_out,
                    Checkpoint{state.theta.layout, state.theta.values,
                               static_cast<std::uint64_t>(state.iteration),
                               cfg.seed});
  };

  const MetaState state =
      train(cfg.reptile, cfg.tasks, cfg.layout(), cfg.workers, hooks);

  save_checkpoint(cfg.checkpoint_out,
                  Checkpoint{state.theta.layout, state.theta.values,
                             static_cast<std::uint64_t>(state.iteration),
                             cfg.seed});
  if (cfg.verbosity >= 1) {
    std::cout << "trained iterations=" << state.iteration << " checkpoint="
              << cfg.checkpoint_out << "\n";
  }
  return kExitOk;
}

int cmd_eval(const CliArgs& args) {
  RunConfig cfg = resolve_config(args);
  if (!args.out_path.empty()) cfg.results_out = args.out_path;
  if (!args.checkpoint_path.empty()) cfg.checkpoint_in = args.checkpoint_path;

  KShotOptions opts;
  opts.eval_iterations = cfg.eval_iterations;
  opts.eval_batch = cfg.eval_batch;
  opts.prior_grid_size = cfg.prior_grid;
  opts.workers = cfg.workers;
  opts.include_std_normal = cfg.eval_std_normal;

  if (!args.only_prior.empty()) {
    const PriorKind kind = prior_kind_from_string(args.only_prior);
    opts.include_uniform = kind == PriorKind::kUniform;
    opts.include_meta = kind == PriorKind::kMeta;
    opts.include_std_normal = kind == PriorKind::kStandardNormal;
  }
  if (opts.include_meta && cfg.checkpoint_in.empty()) {
    throw ConfigError("eval: the meta prior needs --checkpoint (or use "
                      "--prior uniform for a baseline-only run)");
  }

  // Load before any output is created so a bad checkpoint leaves no
  // partial results behind.
  WeightVector theta;
  if (opts.include_meta) {
    theta = weights_from_checkpoint(load_checkpoint(cfg.checkpoint_in));
  }

  if (cfg.verbosity >= 1) {
    opts.on_cell = [](int k, PriorKind kind, Scalar mse) {
      std::cerr << "k=" << k << " prior=" << to_string(kind)
                << " mse=" << format_scalar(mse) << "\n";
    };
  }

  const BenchResult result =
      evaluate_kshot(opts.include_meta ? &theta : nullptr, cfg.bo_config(),
                     cfg.tasks, opts);

  std::ofstream csv(cfg.results_out, std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write " + cfg.results_out);
  write_preamble(csv, cfg);
  csv << "k,mse_uniform,mse_meta";
  if (opts.include_std_normal) csv << ",mse_std_normal";
  csv << "\n";
  for (const BenchRow& row : result.rows) {
    csv << row.k << "," << format_scalar(row.mse_uniform) << ","
        << format_scalar(row.mse_meta);
    if (opts.include_std_normal) csv << "," << format_scalar(row.mse_std_normal);
    csv << "\n";
  }
  csv.close();

  ordered_json j;
  j["seed"] = cfg.seed;
  j["config"] = config_json(cfg);
  j["rows"] = ordered_json::array();
  for (const BenchRow& row : result.rows) {
    ordered_json r;
    r["k"] = row.k;
    r["mse_uniform"] = format_scalar(row.mse_uniform);
    r["mse_meta"] = format_scalar(row.mse_meta);
    if (opts.include_std_normal) {
      r["mse_std_normal"] = format_scalar(row.mse_std_normal);
    }
    j["rows"].push_back(r);
  }
  std::ofstream json_out(sibling_json_path(cfg.results_out), std::ios::trunc);
  json_out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_emit_prior(const CliArgs& args) {
  RunConfig cfg = resolve_config(args);
  if (!args.checkpoint_path.empty()) cfg.checkpoint_in = args.checkpoint_path;
  if (!args.out_path.empty()) cfg.results_out = args.out_path;
  if (cfg.checkpoint_in.empty()) {
    throw ConfigError("emit-prior: --checkpoint is required");
  }

  const WeightVector theta =
      weights_from_checkpoint(load_checkpoint(cfg.checkpoint_in));
  const PriorDensity prior =
      PriorDensity::from_network(theta, cfg.tasks.boundary, cfg.prior_grid);

  std::ofstream csv(cfg.results_out, std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write " + cfg.results_out);
  write_preamble(csv, cfg);
  csv << "x,density\n";
  for (Index i = 0; i < prior.grid().size(); ++i) {
    csv << format_scalar(prior.grid()[i]) << ","
        << format_scalar(prior.density()[i]) << "\n";
  }
  return kExitOk;
}

int cmd_bo_run(const CliArgs& args) {
  RunConfig cfg = resolve_config(args);
  if (!args.checkpoint_path.empty()) cfg.checkpoint_in = args.checkpoint_path;
  if (!args.out_path.empty()) cfg.results_out = args.out_path;

  if (!cfg.tasks.boundary.contains(args.task_mean)) {
    throw ConfigError("bo-run: task mean lies outside the boundary");
  }
  if (!(args.task_std > 0)) {
    throw ConfigError("bo-run: task std must be positive");
  }

  PriorDensity prior = [&] {
    switch (cfg.prior) {
      case PriorKind::kUniform:
        return PriorDensity::uniform(cfg.tasks.boundary, cfg.prior_grid);
      case PriorKind::kStandardNormal:
        return PriorDensity::standard_normal(cfg.tasks.boundary,
                                             cfg.prior_grid);
      case PriorKind::kMeta:
      default: {
        if (cfg.checkpoint_in.empty()) {
          throw ConfigError("bo-run: the meta prior needs --checkpoint");
        }
        const WeightVector theta =
            weights_from_checkpoint(load_checkpoint(cfg.checkpoint_in));
        return PriorDensity::from_network(theta, cfg.tasks.boundary,
                                          cfg.prior_grid);
      }
    }
  }();

  const GaussianTask task{args.task_mean, args.task_std};
  RandomStream rng(cfg.seed);
  const BOTrace trace = run_bo(task, prior, cfg.bo_config(), rng);

  // Refit on the collected observations for the posterior grid dump.
  ObservationSet data;
  for (const BOStep& step : trace.steps) data.add(step.x, step.y);
  const GPPosterior post = fit(data, cfg.kernel);
  const Vector grid = linspace(cfg.tasks.boundary.lo(),
                               cfg.tasks.boundary.hi(), cfg.eval_grid_size);
  Vector means, vars;
  post.predict_many(grid, means, vars);

  const std::string base = [&] {
    const auto dot = cfg.results_out.rfind('.');
    if (dot != std::string::npos && cfg.results_out.substr(dot) == ".csv") {
      return cfg.results_out.substr(0, dot);
    }
    return cfg.results_out;
  }();

  {
    std::ofstream csv(base + ".trace.csv", std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + base + ".trace.csv");
    write_preamble(csv, cfg);
    csv << "# task_mean=" << format_scalar(args.task_mean)
        << "\n# task_std=" << format_scalar(args.task_std) << "\n";
    csv << "step,x,y,acquisition_score\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      const BOStep& s = trace.steps[i];
      csv << (i + 1) << "," << format_scalar(s.x) << "," << format_scalar(s.y)
          << "," << format_scalar(s.acquisition_score) << "\n";
    }
    csv << "# final_mse=" << format_scalar(trace.final_mse) << "\n";
  }
  {
    std::ofstream csv(base + ".posterior.csv", std::ios::trunc);
    if (!csv) {
      throw std::runtime_error("cannot write " + base + ".posterior.csv");
    }
    write_preamble(csv, cfg);
    csv << "x,mean,var\n";
    for (Index i = 0; i < grid.size(); ++i) {
      csv << format_scalar(grid[i]) << "," << format_scalar(means[i]) << ","
          << format_scalar(vars[i]) << "\n";
    }
  }
  if (cfg.verbosity >= 1) {
    std::cout << "final_mse=" << format_scalar(trace.final_mse) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meta-learned priors for few-shot Bayesian optimization"};
  app.require_subcommand(1);

  CliArgs args;
  int (*run)(const CliArgs&) = nullptr;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--set", args.sets,
                    "override any config key (repeatable, key=value)");
  };

  CLI::App* train_cmd = app.add_subcommand("train", "meta-train a prior");
  add_common(train_cmd);
  train_cmd->callback([&] { run = cmd_train; });

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "k-shot benchmark of the configured priors");
  add_common(eval_cmd);
  eval_cmd->add_option("--checkpoint", args.checkpoint_path,
                       "trained checkpoint for the meta prior");
  eval_cmd->add_option("--out", args.out_path, "results CSV path");
  eval_cmd->add_option("--prior", args.only_prior,
                       "evaluate a single prior kind only");
  eval_cmd->add_flag_callback(
      "--std-normal",
      [&] { args.sets.push_back("eval_std_normal=1"); },
      "also evaluate the standard-normal baseline");
  eval_cmd->callback([&] { run = cmd_eval; });

  CLI::App* emit_cmd = app.add_subcommand(
      "emit-prior", "write the normalized meta prior density as CSV");
  add_common(emit_cmd);
  emit_cmd->add_option("--checkpoint", args.checkpoint_path, "trained weights")
      ->required();
  emit_cmd->add_option("--out", args.out_path, "output CSV path");
  emit_cmd->callback([&] { run = cmd_emit_prior; });

  CLI::App* bo_cmd = app.add_subcommand(
      "bo-run", "single optimization trace against a known task");
  add_common(bo_cmd);
  bo_cmd->add_option("--checkpoint", args.checkpoint_path,
                     "trained checkpoint (meta prior)");
  bo_cmd->add_option("--task-mean", args.task_mean, "true task mean");
  bo_cmd->add_option("--task-std", args.task_std, "true task std");
  bo_cmd->add_option_function<long long>(
      "--shots", [&](long long v) {
        args.sets.push_back("shots=" + std::to_string(v));
      },
      "observation budget");
  bo_cmd->add_option("--out", args.out_path, "output base path");
  bo_cmd->callback([&] { run = cmd_bo_run; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return run(args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckpoint;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
