#pragma once

#include "metaprior/common.hpp"
#include "metaprior/nn.hpp"
#include "metaprior/rng.hpp"

namespace metaprior {

// Symmetric sampling interval [-radius, +radius].
struct Boundary {
  Scalar radius = 4.0;

  Scalar lo() const { return -radius; }
  Scalar hi() const { return radius; }
  bool contains(Scalar x) const { return x >= lo() && x <= hi(); }
};

// One task: a Gaussian density with mean inside the boundary.
struct GaussianTask {
  Scalar mean = 0.0;
  Scalar stddev = 1.0;
};

struct TaskClassConfig {
  Boundary boundary{4.0};
  Scalar std_min = 0.5;
  Scalar std_max = 2.0;
  Scalar noise_var = 1e-4;  // variance of the observation noise
};

// Throws std::invalid_argument when radius or the std range is invalid.
void validate(const TaskClassConfig& cfg);

// mean ~ U(boundary), stddev ~ U[std_min, std_max]; draws mean first.
GaussianTask sample_task(const TaskClassConfig& cfg, RandomStream& rng);

// Gaussian pdf of the task at x.
Scalar task_density(const GaussianTask& task, Scalar x);

// Noisy function evaluation: density(x) plus N(0, noise_var) when
// noise_var > 0, exact otherwise.
Scalar observe(const GaussianTask& task, Scalar noise_var, Scalar x,
               RandomStream& rng);

// size inputs uniform on the boundary with noisy density targets; all xs
// are drawn before the noise terms.
Minibatch sample_minibatch(const GaussianTask& task, const TaskClassConfig& cfg,
                           Index size, RandomStream& rng);

}  // namespace metaprior
