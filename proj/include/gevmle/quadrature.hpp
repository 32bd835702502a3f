#pragma once

#include <functional>

namespace gevmle {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Integral of f over the open interval (a, b); either end may be infinite.
///
/// Double-exponential rules (tanh-sinh / exp-sinh / sinh-sinh) are used, so f
/// is never evaluated at a finite endpoint and integrable endpoint
/// singularities are handled. Non-finite integrand values are treated as 0.
[[nodiscard]] QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                                         double tolerance = 1e-12);

}  // namespace gevmle
