#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "metaprior/bo.hpp"
#include "metaprior/reptile.hpp"
#include "metaprior/tasks.hpp"

namespace metaprior {

// Resolved settings for every subcommand. Defaults reproduce the reference
// hyperparameter tables; a flat key=value file and command-line overrides
// layer on top.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0 = all hardware threads
  int verbosity = 1;

  TaskClassConfig tasks{};

  Index model_size = 64;  // hidden width of the 1-h-h-1 network
  ReptileConfig reptile{};

  KernelParams kernel{};
  AcquisitionKind acquisition = AcquisitionKind::kExpectedImprovement;
  Index mc_samples = 100000;
  Index prior_grid = 1024;
  Index eval_grid_size = 256;
  Index shots = 10;
  PriorKind prior = PriorKind::kMeta;

  Index eval_iterations = 32;
  Index eval_batch = 10;
  bool eval_std_normal = false;

  Index progress_every = 100;
  Index checkpoint_every = 1000;

  std::string checkpoint_in;
  std::string checkpoint_out = "checkpoint.bin";
  std::string results_out = "results.csv";

  Layout layout() const;
  BORunConfig bo_config() const;
};

RunConfig default_config();

// Applies one key=value override; throws ConfigError on unknown keys or
// unparsable values.
void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value);

// Flat key=value file; '#' starts a comment, blank lines are skipped.
RunConfig parse_config_file(const std::filesystem::path& path);

// Ordered (key, value) pairs of the semantic settings: everything that
// shapes results, excluding execution details (workers, verbosity, paths).
// Result files echo exactly this list.
std::vector<std::pair<std::string, std::string>> semantic_entries(
    const RunConfig& cfg);

std::string format_scalar(Scalar v);  // shortest round-trip-safe form

}  // namespace metaprior
