#pragma once

#include <cstdint>
#include <string>

#include "metaprior/gp.hpp"
#include "metaprior/math.hpp"
#include "metaprior/prior.hpp"
#include "metaprior/rng.hpp"

namespace metaprior {

enum class AcquisitionKind { kProbabilityOfImprovement, kExpectedImprovement };

std::string to_string(AcquisitionKind kind);
AcquisitionKind acquisition_from_string(const std::string& name);

struct MCConfig {
  Index sample_count = 100000;
  std::uint64_t seed = 0;
};

// Posterior standard deviations below this are treated as collapsed: the
// improvement statistic saturates and expected improvement scores zero.
inline constexpr Scalar kSigmaFloor = 1e-9;
inline constexpr Scalar kSaturatedImprovement = 1e9;

// Standardized improvement (best_y - mean(x)) / sd(x). Collapsed sd maps
// to +/-kSaturatedImprovement by the sign of the numerator, 0 when the
// numerator is zero too.
Scalar improvement_score(Scalar x, const GPPosterior& post, Scalar best_y);

// Acquisition from posterior moments; shared by the scalar and the
// Monte-Carlo batched paths.
Scalar acquire_from_moments(Scalar mean, Scalar var, Scalar best_y,
                            AcquisitionKind kind);

// Probability of improvement Phi(gamma) or expected improvement
// sd * (gamma * Phi(gamma) + phi(gamma)); both nonnegative.
Scalar acquire(Scalar x, const GPPosterior& post, Scalar best_y,
               AcquisitionKind kind);

struct AcquisitionChoice {
  Scalar x = 0;
  Scalar score = 0;
  // All candidates scored zero and the choice fell back to the prior mode.
  bool prior_mode_fallback = false;
};

// Draws mc.sample_count candidates uniformly on the boundary, scores each
// as acquire(x) * prior density(x), and returns the maximizer; exact score
// ties resolve to the smallest x. Deterministic given the stream state.
AcquisitionChoice mc_acquire_argmax(const GPPosterior& post, Scalar best_y,
                                    AcquisitionKind kind,
                                    const PriorDensity& prior,
                                    Boundary boundary, const MCConfig& mc,
                                    RandomStream& rng);

}  // namespace metaprior
