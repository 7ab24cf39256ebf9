#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "metaprior/nn.hpp"
#include "metaprior/tasks.hpp"

namespace metaprior {

struct ReptileConfig {
  Scalar inner_step = 0.02;
  Index inner_batch = 5;
  Index inner_iters = 8;
  Scalar outer_step = 0.1;
  Index outer_iters = 10000;
  Index meta_batch = 10;
  std::uint64_t seed = 0;
};

void validate(const ReptileConfig& cfg);

struct MetaState {
  WeightVector theta;
  Index iteration = 0;
};

// Optional observers for the training loop. Callbacks fire on the
// coordinator thread only.
struct TrainHooks {
  Index progress_every = 0;  // 0 disables progress records
  std::function<void(Index iteration, Scalar mean_inner_loss)> on_progress;
  Index checkpoint_every = 0;  // 0 disables periodic checkpoints
  std::function<void(const MetaState&)> on_checkpoint;
};

// Task adaptation: inner_iters SGD steps on fresh minibatches. Throws
// DivergenceError (with the inner step index) if weights leave the finite
// range. When mean_loss is given it receives the average pre-step batch
// loss across the inner iterations.
WeightVector inner_adapt(const WeightVector& theta, const GaussianTask& task,
                         const ReptileConfig& cfg,
                         const TaskClassConfig& task_cfg, RandomStream& rng,
                         Scalar* mean_loss = nullptr);

// theta <- theta + outer_step * mean(candidate - theta); increments the
// iteration counter. Candidates must share theta's layout.
MetaState meta_step(MetaState state, const std::vector<WeightVector>& candidates,
                    const ReptileConfig& cfg);

// Full outer loop. Candidate computation for one meta-batch runs on up to
// `workers` threads; every task draws from a stream derived from
// (seed, outer_iteration, task_index), so the result is bit-identical for
// any worker count.
MetaState train(const ReptileConfig& cfg, const TaskClassConfig& task_cfg,
                const Layout& layout, std::size_t workers = 0,
                const TrainHooks& hooks = {});

}  // namespace metaprior
