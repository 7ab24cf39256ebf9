#pragma once

#include <string>

#include "metaprior/common.hpp"
#include "metaprior/nn.hpp"
#include "metaprior/tasks.hpp"

namespace metaprior {

enum class PriorKind { kMeta, kUniform, kStandardNormal };

std::string to_string(PriorKind kind);
PriorKind prior_kind_from_string(const std::string& name);

// Normalized density on a uniform grid spanning the boundary. Immutable
// after construction; the trapezoidal integral over the grid is 1.
class PriorDensity {
 public:
  // Network output sampled on the grid, clamped below kClampFloor, then
  // normalized. Throws DegeneratePriorError when the raw output is
  // nonpositive everywhere.
  static PriorDensity from_network(const WeightVector& theta,
                                   Boundary boundary, Index grid_size);

  static PriorDensity uniform(Boundary boundary, Index grid_size);

  // N(0,1) restricted to the boundary and renormalized.
  static PriorDensity standard_normal(Boundary boundary, Index grid_size);

  const Vector& grid() const { return grid_; }
  const Vector& density() const { return density_; }
  PriorKind kind() const { return kind_; }
  Boundary boundary() const { return Boundary{grid_[grid_.size() - 1]}; }

  // Linear interpolation between grid points; arguments outside the grid
  // clamp to the end values.
  Scalar at(Scalar x) const;

  // Grid point with the highest density (ties resolve to the smallest x).
  Scalar mode() const;

  static constexpr Scalar kClampFloor = 1e-6;

 private:
  PriorDensity(Vector grid, Vector raw, PriorKind kind);

  Vector grid_;
  Vector density_;
  PriorKind kind_;
  Scalar x0_ = 0;
  Scalar step_ = 0;
};

}  // namespace metaprior
