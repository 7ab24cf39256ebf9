#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "metaprior/acquisition.hpp"
#include "metaprior/gp.hpp"
#include "metaprior/prior.hpp"
#include "metaprior/tasks.hpp"

namespace metaprior {

struct BORunConfig {
  Index shots = 10;
  PriorKind prior_kind = PriorKind::kMeta;
  AcquisitionKind acquisition = AcquisitionKind::kExpectedImprovement;
  KernelParams kernel{};
  MCConfig mc{};
  Index eval_grid_size = 256;
  Scalar observation_noise_var = 1e-4;
  std::uint64_t seed = 0;
};

void validate(const BORunConfig& cfg);

struct BOStep {
  Scalar x = 0;
  Scalar y = 0;
  Scalar acquisition_score = 0;
};

struct BOTrace {
  std::vector<BOStep> steps;
  Scalar final_mse = 0;
};

// One optimization run: `shots` rounds of prior-weighted acquisition,
// noisy observation, and GP refit. final_mse is the mean squared gap
// between the final posterior mean and the true task density on a uniform
// evaluation grid. Deterministic given the stream state.
BOTrace run_bo(const GaussianTask& task, const PriorDensity& prior,
               const BORunConfig& cfg, RandomStream& rng);

struct BenchRow {
  int k = 0;
  Scalar mse_uniform = 0;
  Scalar mse_meta = 0;
  Scalar mse_std_normal = 0;  // NaN when not evaluated
};

struct BenchResult {
  std::vector<BenchRow> rows;  // k ascending, 1..10
};

struct KShotOptions {
  Index eval_iterations = 32;  // independent evaluation tasks
  Index eval_batch = 10;       // repeated seeded runs per task
  Index prior_grid_size = 1024;
  bool include_uniform = true;
  bool include_meta = true;
  bool include_std_normal = false;
  std::size_t workers = 0;
  // Called per finished (k, prior) column on the coordinator thread.
  std::function<void(int k, PriorKind kind, Scalar mse)> on_cell;
};

// k-shot benchmark over k = 1..10: every included prior sees the same
// evaluation tasks; each (k, prior, task) cell averages final_mse over
// eval_batch runs with distinct derived seeds. Cell seeds depend only on
// indices, so results are identical for any worker count. Pass nullptr
// for meta_theta to evaluate baselines only.
BenchResult evaluate_kshot(const WeightVector* meta_theta,
                           const BORunConfig& cfg_template,
                           const TaskClassConfig& task_cfg,
                           const KShotOptions& opts);

// Same benchmark on a caller-provided task set (eval_iterations is taken
// from the list length).
BenchResult evaluate_kshot_tasks(const WeightVector* meta_theta,
                                 const BORunConfig& cfg_template,
                                 const TaskClassConfig& task_cfg,
                                 const std::vector<GaussianTask>& tasks,
                                 const KShotOptions& opts);

}  // namespace metaprior
