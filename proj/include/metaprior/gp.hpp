#pragma once

#include <utility>
#include <vector>

#include "metaprior/common.hpp"

namespace metaprior {

// Squared-exponential kernel parameters: amplitude is the signal variance,
// length_scales holds one entry per input dimension (one here), noise_var
// is added to the Gram diagonal together with the conditioning jitter.
struct KernelParams {
  Scalar amplitude = 1.0;
  std::vector<Scalar> length_scales{1.0};
  Scalar noise_var = 1e-6;
};

void validate(const KernelParams& p);

// k(a, b) = amplitude * exp(-(a-b)^2 / (2 * l^2))
Scalar kernel(Scalar a, Scalar b, const KernelParams& p);

struct ObservationSet {
  std::vector<Scalar> xs;
  std::vector<Scalar> ys;

  void add(Scalar x, Scalar y) {
    xs.push_back(x);
    ys.push_back(y);
  }
  std::size_t size() const { return xs.size(); }
  bool empty() const { return xs.empty(); }
};

// Exact GP regression state: Cholesky factor of K + (noise_var + jitter) I
// plus the solved weights. Immutable after fit; queries are read-only.
class GPPosterior {
 public:
  std::pair<Scalar, Scalar> predict(Scalar x) const;  // (mean, variance)

  // Vectorized prediction over a query batch.
  void predict_many(const Vector& xs, Vector& means, Vector& vars) const;

  const KernelParams& params() const { return params_; }
  // noise_var + the jitter that made the factorization succeed; the value
  // a dense reconstruction must place on the Gram diagonal.
  Scalar effective_noise_var() const { return effective_noise_; }
  Index size() const { return train_x_.size(); }

 private:
  friend GPPosterior fit(const ObservationSet&, const KernelParams&);

  KernelParams params_;
  Vector train_x_;
  Vector alpha_;
  Matrix chol_lower_;
  Scalar effective_noise_ = 0;
};

// Empty observations give the prior (mean 0, variance = amplitude).
// Factorization failures escalate jitter from 1e-10*amplitude by factors
// of 10 up to 1e-4*amplitude, then throw IllConditionedError.
GPPosterior fit(const ObservationSet& obs, const KernelParams& p);

inline std::pair<Scalar, Scalar> predict(const GPPosterior& post, Scalar x) {
  return post.predict(x);
}

}  // namespace metaprior
