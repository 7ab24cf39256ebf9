#include "metaprior/tasks.hpp"

#include <cmath>
#include <stdexcept>

#include "metaprior/math.hpp"

namespace metaprior {

void validate(const TaskClassConfig& cfg) {
  if (!(cfg.boundary.radius > 0)) {
    throw std::invalid_argument("tasks: boundary radius must be positive");
  }
  if (!(cfg.std_min > 0) || cfg.std_min > cfg.std_max) {
    throw std::invalid_argument("tasks: need 0 < std_min <= std_max");
  }
  if (cfg.noise_var < 0) {
    throw std::invalid_argument("tasks: noise_var must be nonnegative");
  }
}

GaussianTask sample_task(const TaskClassConfig& cfg, RandomStream& rng) {
  validate(cfg);
  GaussianTask task;
  task.mean = rng.uniform(cfg.boundary.lo(), cfg.boundary.hi());
  task.stddev = rng.uniform(cfg.std_min, cfg.std_max);
  return task;
}

Scalar task_density(const GaussianTask& task, Scalar x) {
  const Scalar z = (x - task.mean) / task.stddev;
  return std_normal_pdf(z) / task.stddev;
}

Scalar observe(const GaussianTask& task, Scalar noise_var, Scalar x,
               RandomStream& rng) {
  Scalar y = task_density(task, x);
  if (noise_var > 0) y += rng.normal(0.0, std::sqrt(noise_var));
  return y;
}

Minibatch sample_minibatch(const GaussianTask& task, const TaskClassConfig& cfg,
                           Index size, RandomStream& rng) {
  if (size < 1) throw std::invalid_argument("sample_minibatch: size >= 1");
  Minibatch batch;
  batch.xs.resize(size);
  batch.ys.resize(size);
  for (Index i = 0; i < size; ++i) {
    batch.xs[i] = rng.uniform(cfg.boundary.lo(), cfg.boundary.hi());
  }
  for (Index i = 0; i < size; ++i) {
    batch.ys[i] = observe(task, cfg.noise_var, batch.xs[i], rng);
  }
  return batch;
}

}  // namespace metaprior
