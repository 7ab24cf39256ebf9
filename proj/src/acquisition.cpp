#include "metaprior/acquisition.hpp"

#include <cmath>
#include <stdexcept>

namespace metaprior {

std::string to_string(AcquisitionKind kind) {
  return kind == AcquisitionKind::kProbabilityOfImprovement ? "pi" : "ei";
}

AcquisitionKind acquisition_from_string(const std::string& name) {
  if (name == "pi") return AcquisitionKind::kProbabilityOfImprovement;
  if (name == "ei") return AcquisitionKind::kExpectedImprovement;
  throw ConfigError("unknown acquisition kind: " + name);
}

Scalar improvement_score(Scalar x, const GPPosterior& post, Scalar best_y) {
  const auto [mean, var] = post.predict(x);
  const Scalar sd = std::sqrt(var);
  const Scalar gap = best_y - mean;
  if (sd < kSigmaFloor) {
    if (gap > 0) return kSaturatedImprovement;
    if (gap < 0) return -kSaturatedImprovement;
    return 0.0;
  }
  return gap / sd;
}

Scalar acquire_from_moments(Scalar mean, Scalar var, Scalar best_y,
                            AcquisitionKind kind) {
  const Scalar sd = std::sqrt(var);
  const Scalar gap = best_y - mean;

  if (sd < kSigmaFloor) {
    if (kind == AcquisitionKind::kExpectedImprovement) return 0.0;
    if (gap > 0) return 1.0;
    if (gap < 0) return 0.0;
    return 0.5;
  }

  const Scalar gamma = gap / sd;
  if (kind == AcquisitionKind::kProbabilityOfImprovement) {
    return std_normal_cdf(gamma);
  }
  const Scalar ei =
      sd * (gamma * std_normal_cdf(gamma) + std_normal_pdf(gamma));
  return ei > 0 ? ei : 0.0;  // cancellation for very negative gamma
}

Scalar acquire(Scalar x, const GPPosterior& post, Scalar best_y,
               AcquisitionKind kind) {
  const auto [mean, var] = post.predict(x);
  return acquire_from_moments(mean, var, best_y, kind);
}

AcquisitionChoice mc_acquire_argmax(const GPPosterior& post, Scalar best_y,
                                    AcquisitionKind kind,
                                    const PriorDensity& prior,
                                    Boundary boundary, const MCConfig& mc,
                                    RandomStream& rng) {
  if (mc.sample_count < 1) {
    throw std::invalid_argument("mc_acquire_argmax: sample_count >= 1");
  }

  const Index m = mc.sample_count;
  Vector candidates(m);
  for (Index i = 0; i < m; ++i) {
    candidates[i] = rng.uniform(boundary.lo(), boundary.hi());
  }

  Vector means, vars;
  post.predict_many(candidates, means, vars);

  AcquisitionChoice choice;
  bool have_positive = false;
  Scalar best_score = -1.0;
  Scalar best_x = 0.0;
  for (Index i = 0; i < m; ++i) {
    const Scalar score = acquire_from_moments(means[i], vars[i], best_y, kind) *
                         prior.at(candidates[i]);
    if (score > best_score ||
        (score == best_score && candidates[i] < best_x)) {
      best_score = score;
      best_x = candidates[i];
      have_positive = score > 0;
    }
  }

  if (!have_positive) {
    choice.x = prior.mode();
    choice.score = 0.0;
    choice.prior_mode_fallback = true;
    return choice;
  }
  choice.x = best_x;
  choice.score = best_score;
  return choice;
}

}  // namespace metaprior
