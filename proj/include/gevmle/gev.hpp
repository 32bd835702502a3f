#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace gevmle {

inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPlusInf = std::numeric_limits<double>::infinity();

/// Below this |gamma| every formula switches to its gamma = 0 limit.
inline constexpr double kGammaZeroCutoff = 1e-8;

/// A point (gamma, mu, sigma) of the GEV parameter space.
///
/// Only sigma > 0 is enforced here; the stronger gamma > -1 requirement of the
/// likelihood search is checked by `in_search_space`.
struct GevParams {
  double gamma = 0.0;
  double mu = 0.0;
  double sigma = 1.0;

  friend bool operator==(const GevParams&, const GevParams&) = default;
};

[[nodiscard]] bool is_valid(const GevParams& p) noexcept;
[[nodiscard]] bool in_search_space(const GevParams& p) noexcept;

/// Open interval (lower, upper) on which 1 + gamma * x > 0.
struct SupportInterval {
  double lower = kMinusInf;
  double upper = kPlusInf;

  [[nodiscard]] bool contains(double x) const noexcept { return x > lower && x < upper; }
};

[[nodiscard]] SupportInterval gev_support(double gamma) noexcept;
/// Support of the three-parameter law, mu + sigma * gev_support(gamma).
[[nodiscard]] SupportInterval gev_support(const GevParams& p) noexcept;

/// F_gamma(x) = exp(-(1 + gamma x)^(-1/gamma)); 0 or 1 outside the support.
[[nodiscard]] double gev_cdf(double gamma, double x) noexcept;

/// Inverse of gev_cdf. Throws std::domain_error unless 0 < u < 1.
[[nodiscard]] double gev_quantile(double gamma, double u);

/// n draws sigma * gev_quantile(gamma, U) + mu from a seeded generator.
[[nodiscard]] std::vector<double> gev_sample(const GevParams& p, std::size_t n, std::uint64_t seed);

/// Standard GEV log-density. Returns -inf when 1 + gamma x <= 0.
[[nodiscard]] double gev_loglik(double gamma, double x) noexcept;

/// l_(gamma,mu,sigma)(x) = l_gamma((x - mu) / sigma) - log sigma.
[[nodiscard]] double gev_loglik3(const GevParams& p, double x) noexcept;

/// Partial derivatives of gev_loglik3 in the order (gamma, mu, sigma).
using Gradient3 = std::array<double, 3>;

/// Analytic gradient of gev_loglik3. Throws std::domain_error when x is not
/// strictly inside the support of p.
[[nodiscard]] Gradient3 gev_loglik_gradient(const GevParams& p, double x);

/// Derivative of l_gamma with respect to its argument.
[[nodiscard]] double gev_loglik_dx(double gamma, double x);

/// Location of the unique maximum of l_gamma; requires gamma > -1.
[[nodiscard]] double gev_mode(double gamma);

/// Value (1 + gamma)(log(1 + gamma) - 1) of l_gamma at its mode; requires gamma > -1.
[[nodiscard]] double gev_loglik_max(double gamma);

}  // namespace gevmle
