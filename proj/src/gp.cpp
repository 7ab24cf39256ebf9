#include "metaprior/gp.hpp"

#include <cmath>
#include <stdexcept>

namespace metaprior {

void validate(const KernelParams& p) {
  if (!(p.amplitude > 0)) {
    throw std::invalid_argument("kernel: amplitude must be positive");
  }
  if (p.length_scales.empty()) {
    throw std::invalid_argument("kernel: need at least one length scale");
  }
  for (Scalar l : p.length_scales) {
    if (!(l > 0)) {
      throw std::invalid_argument("kernel: length scales must be positive");
    }
  }
  if (p.noise_var < 0) {
    throw std::invalid_argument("kernel: noise_var must be nonnegative");
  }
}

Scalar kernel(Scalar a, Scalar b, const KernelParams& p) {
  const Scalar l = p.length_scales[0];
  const Scalar d = a - b;
  return p.amplitude * std::exp(-d * d / (2.0 * l * l));
}

GPPosterior fit(const ObservationSet& obs, const KernelParams& p) {
  validate(p);
  if (obs.xs.size() != obs.ys.size()) {
    throw std::invalid_argument("fit: xs/ys length mismatch");
  }

  GPPosterior post;
  post.params_ = p;
  if (obs.empty()) return post;  // prior: mean 0, variance = amplitude

  const Index n = static_cast<Index>(obs.size());
  post.train_x_ = Eigen::Map<const Vector>(obs.xs.data(), n);
  const Vector y = Eigen::Map<const Vector>(obs.ys.data(), n);

  Matrix gram(n, n);
  for (Index i = 0; i < n; ++i) {
    gram(i, i) = p.amplitude;
    for (Index j = 0; j < i; ++j) {
      const Scalar k = kernel(obs.xs[i], obs.xs[j], p);
      gram(i, j) = k;
      gram(j, i) = k;
    }
  }

  for (Scalar jitter = 1e-10 * p.amplitude; jitter <= 1e-4 * p.amplitude;
       jitter *= 10.0) {
    Matrix regularized = gram;
    regularized.diagonal().array() += p.noise_var + jitter;
    Eigen::LLT<Matrix> llt(regularized);
    if (llt.info() == Eigen::Success) {
      post.chol_lower_ = llt.matrixL();
      post.alpha_ = llt.solve(y);
      post.effective_noise_ = p.noise_var + jitter;
      return post;
    }
  }
  throw IllConditionedError(
      "fit: Gram matrix not positive definite after jitter escalation");
}

std::pair<Scalar, Scalar> GPPosterior::predict(Scalar x) const {
  if (train_x_.size() == 0) return {0.0, params_.amplitude};

  const Scalar l = params_.length_scales[0];
  const Vector kstar =
      ((-(train_x_.array() - x).square() / (2.0 * l * l)).exp() *
       params_.amplitude)
          .matrix();

  const Scalar mean = kstar.dot(alpha_);
  const Vector v =
      chol_lower_.triangularView<Eigen::Lower>().solve(kstar);
  const Scalar var = params_.amplitude - v.squaredNorm();
  return {mean, var > 0 ? var : 0.0};
}

void GPPosterior::predict_many(const Vector& xs, Vector& means,
                               Vector& vars) const {
  const Index m = xs.size();
  means.resize(m);
  vars.resize(m);
  if (train_x_.size() == 0) {
    means.setZero();
    vars.setConstant(params_.amplitude);
    return;
  }

  const Scalar l = params_.length_scales[0];
  const Index n = train_x_.size();
  Matrix kstar(n, m);
  for (Index i = 0; i < n; ++i) {
    kstar.row(i) = ((-(xs.array() - train_x_[i]).square() / (2.0 * l * l))
                        .exp() *
                    params_.amplitude)
                       .matrix()
                       .transpose();
  }

  means.noalias() = kstar.transpose() * alpha_;
  chol_lower_.triangularView<Eigen::Lower>().solveInPlace(kstar);
  vars = (params_.amplitude - kstar.colwise().squaredNorm().transpose().array())
             .max(0.0)
             .matrix();
}

}  // namespace metaprior
