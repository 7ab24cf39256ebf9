#include "metaprior/reptile.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "metaprior/parallel.hpp"

namespace metaprior {

namespace {
// Stream tag separating coordinator task sampling from worker adaptation.
constexpr std::uint64_t kTaskStreamTag = 0x7461736b73ULL;   // "tasks"
constexpr std::uint64_t kAdaptStreamTag = 0x6164617074ULL;  // "adapt"
}  // namespace

void validate(const ReptileConfig& cfg) {
  if (!(cfg.inner_step > 0) || !(cfg.outer_step > 0)) {
    throw std::invalid_argument("reptile: step sizes must be positive");
  }
  if (cfg.inner_batch < 1 || cfg.meta_batch < 1) {
    throw std::invalid_argument("reptile: batch sizes must be >= 1");
  }
  if (cfg.inner_iters < 0 || cfg.outer_iters < 0) {
    throw std::invalid_argument("reptile: iteration counts must be >= 0");
  }
}

WeightVector inner_adapt(const WeightVector& theta, const GaussianTask& task,
                         const ReptileConfig& cfg,
                         const TaskClassConfig& task_cfg, RandomStream& rng,
                         Scalar* mean_loss) {
  WeightVector w = theta;
  Scalar loss_sum = 0;
  for (Index it = 0; it < cfg.inner_iters; ++it) {
    const Minibatch batch =
        sample_minibatch(task, task_cfg, cfg.inner_batch, rng);
    const LossGrad lg = mse_loss_grad(w, batch);
    if (!std::isfinite(lg.loss) || !lg.grad.values.allFinite()) {
      throw DivergenceError(
          "inner_adapt: non-finite loss/gradient at inner step " +
              std::to_string(it),
          static_cast<std::size_t>(it));
    }
    loss_sum += lg.loss;
    w.values -= cfg.inner_step * lg.grad.values;
    if (!w.values.allFinite()) {
      throw DivergenceError(
          "inner_adapt: non-finite weights after inner step " +
              std::to_string(it),
          static_cast<std::size_t>(it));
    }
  }
  if (mean_loss != nullptr) {
    *mean_loss = cfg.inner_iters > 0
                     ? loss_sum / static_cast<Scalar>(cfg.inner_iters)
                     : std::numeric_limits<Scalar>::quiet_NaN();
  }
  return w;
}

MetaState meta_step(MetaState state, const std::vector<WeightVector>& candidates,
                    const ReptileConfig& cfg) {
  if (candidates.empty()) {
    throw std::invalid_argument("meta_step: no candidates");
  }
  for (const WeightVector& c : candidates) {
    if (!c.same_layout(state.theta)) {
      throw std::invalid_argument("meta_step: candidate layout mismatch");
    }
  }

  // Accumulated in task index order so the update is scheduling-independent.
  Vector delta = Vector::Zero(state.theta.values.size());
  for (const WeightVector& c : candidates) {
    delta += c.values - state.theta.values;
  }
  state.theta.values +=
      (cfg.outer_step / static_cast<Scalar>(candidates.size())) * delta;
  state.iteration += 1;
  return state;
}

MetaState train(const ReptileConfig& cfg, const TaskClassConfig& task_cfg,
                const Layout& layout, std::size_t workers,
                const TrainHooks& hooks) {
  validate(cfg);
  validate(task_cfg);
  validate_layout(layout);

  MetaState state{init_weights(layout, cfg.seed), 0};

  // Coordinator-only stream; tasks for every meta-batch are drawn
  // sequentially regardless of the worker count.
  RandomStream task_rng(derive_seed(cfg.seed, kTaskStreamTag));

  const std::size_t batch = static_cast<std::size_t>(cfg.meta_batch);
  std::vector<GaussianTask> tasks(batch);
  std::vector<WeightVector> candidates(batch);
  std::vector<Scalar> losses(batch, 0);

  for (Index iter = 0; iter < cfg.outer_iters; ++iter) {
    for (std::size_t i = 0; i < batch; ++i) {
      tasks[i] = sample_task(task_cfg, task_rng);
    }

    try {
      parallel_for_index(batch, workers, [&](std::size_t i) {
        RandomStream rng(derive_seed(cfg.seed, kAdaptStreamTag,
                                     static_cast<std::uint64_t>(iter),
                                     static_cast<std::uint64_t>(i)));
        candidates[i] =
            inner_adapt(state.theta, tasks[i], cfg, task_cfg, rng, &losses[i]);
      });
    } catch (const DivergenceError& e) {
      throw DivergenceError("train: divergence at outer iteration " +
                                std::to_string(iter) + " (" + e.what() + ")",
                            static_cast<std::size_t>(iter));
    }

    state = meta_step(std::move(state), candidates, cfg);

    if (hooks.progress_every > 0 && hooks.on_progress &&
        state.iteration % hooks.progress_every == 0) {
      Scalar sum = 0;
      for (Scalar l : losses) sum += l;
      hooks.on_progress(state.iteration, sum / static_cast<Scalar>(batch));
    }
    if (hooks.checkpoint_every > 0 && hooks.on_checkpoint &&
        state.iteration % hooks.checkpoint_every == 0) {
      hooks.on_checkpoint(state);
    }
  }
  return state;
}

}  // namespace metaprior
