#include "metaprior/prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "metaprior/math.hpp"

namespace metaprior {

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::kMeta:
      return "meta";
    case PriorKind::kUniform:
      return "uniform";
    case PriorKind::kStandardNormal:
      return "standard_normal";
  }
  return "unknown";
}

PriorKind prior_kind_from_string(const std::string& name) {
  if (name == "meta") return PriorKind::kMeta;
  if (name == "uniform") return PriorKind::kUniform;
  if (name == "standard_normal") return PriorKind::kStandardNormal;
  throw ConfigError("unknown prior kind: " + name);
}

PriorDensity::PriorDensity(Vector grid, Vector raw, PriorKind kind)
    : grid_(std::move(grid)), density_(std::move(raw)), kind_(kind) {
  if (grid_.size() < 2 || grid_.size() != density_.size()) {
    throw std::invalid_argument("PriorDensity: bad grid");
  }
  const Scalar mass = trapezoid(grid_, density_);
  if (!(mass > 0) || !std::isfinite(mass)) {
    throw DegeneratePriorError("PriorDensity: cannot normalize density");
  }
  density_ /= mass;
  x0_ = grid_[0];
  step_ = (grid_[grid_.size() - 1] - grid_[0]) /
          static_cast<Scalar>(grid_.size() - 1);
}

PriorDensity PriorDensity::from_network(const WeightVector& theta,
                                        Boundary boundary, Index grid_size) {
  if (grid_size < 16) {
    throw std::invalid_argument("from_network: grid_size must be >= 16");
  }
  Vector grid = linspace(boundary.lo(), boundary.hi(), grid_size);
  Vector raw = forward_batch(theta, grid);
  if (raw.maxCoeff() <= 0) {
    throw DegeneratePriorError(
        "from_network: network output is nonpositive everywhere");
  }
  raw = raw.cwiseMax(kClampFloor);
  return PriorDensity(std::move(grid), std::move(raw), PriorKind::kMeta);
}

PriorDensity PriorDensity::uniform(Boundary boundary, Index grid_size) {
  if (grid_size < 2) {
    throw std::invalid_argument("uniform prior: grid_size must be >= 2");
  }
  Vector grid = linspace(boundary.lo(), boundary.hi(), grid_size);
  Vector raw = Vector::Ones(grid_size);
  return PriorDensity(std::move(grid), std::move(raw), PriorKind::kUniform);
}

PriorDensity PriorDensity::standard_normal(Boundary boundary, Index grid_size) {
  if (grid_size < 2) {
    throw std::invalid_argument(
        "standard_normal prior: grid_size must be >= 2");
  }
  Vector grid = linspace(boundary.lo(), boundary.hi(), grid_size);
  Vector raw = grid.unaryExpr([](Scalar x) { return std_normal_pdf(x); });
  return PriorDensity(std::move(grid), std::move(raw),
                      PriorKind::kStandardNormal);
}

Scalar PriorDensity::at(Scalar x) const {
  const Index n = grid_.size();
  const Scalar t = (x - x0_) / step_;
  if (t <= 0) return density_[0];
  if (t >= static_cast<Scalar>(n - 1)) return density_[n - 1];
  const Index i = static_cast<Index>(t);
  const Scalar frac = t - static_cast<Scalar>(i);
  return density_[i] + frac * (density_[i + 1] - density_[i]);
}

Scalar PriorDensity::mode() const {
  Index best = 0;
  for (Index i = 1; i < density_.size(); ++i) {
    if (density_[i] > density_[best]) best = i;
  }
  return grid_[best];
}

}  // namespace metaprior
