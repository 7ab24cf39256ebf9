#pragma once

#include <cmath>

#include "metaprior/common.hpp"

namespace metaprior {

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2*pi)
inline constexpr double kSqrt2 = 1.4142135623730951;

// Standard normal density.
template <typename S>
S std_normal_pdf(S z) {
  return static_cast<S>(kInvSqrt2Pi) * std::exp(S(-0.5) * z * z);
}

// Standard normal CDF via the C library's erfc: Phi(z) = erfc(-z/sqrt(2))/2,
// accurate to a few ulps which covers the 1e-9 contract with margin.
template <typename S>
S std_normal_cdf(S z) {
  return S(0.5) * std::erfc(-z / static_cast<S>(kSqrt2));
}

// Trapezoidal rule over sample points (x strictly increasing).
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar trapezoid(const Eigen::MatrixBase<DerivedX>& x,
                                    const Eigen::MatrixBase<DerivedY>& y) {
  const Index n = x.size();
  if (n < 2) return typename DerivedX::Scalar(0);
  return typename DerivedX::Scalar(0.5) *
         ((x.tail(n - 1) - x.head(n - 1)).array() *
          (y.tail(n - 1) + y.head(n - 1)).array())
             .sum();
}

inline Vector linspace(Scalar lo, Scalar hi, Index n) {
  return Vector::LinSpaced(n, lo, hi);
}

}  // namespace metaprior
