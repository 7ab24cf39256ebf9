#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace metaprior {

using Scalar = double;

template <typename S>
using VectorX = Eigen::Vector<S, Eigen::Dynamic>;
template <typename S>
using MatrixX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<Scalar>;
using Matrix = MatrixX<Scalar>;
using Index = Eigen::Index;

// Inner SGD produced non-finite weights; `iteration` is the step at which
// the blow-up was detected.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string what, std::size_t iteration)
      : std::runtime_error(std::move(what)), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

// Gram matrix could not be factorized even after jitter escalation.
class IllConditionedError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Network output is nonpositive everywhere; no density can be formed.
class DegeneratePriorError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace metaprior
