#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gevmle/rng.hpp"

namespace gevmle {

/// Raised for distribution specs or members that cannot be used as requested.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sampling law F in the domain of attraction of G_gamma0, described by its
/// quantile function.
///
/// `tail_quantile(t)` is U(t) = F^{-1}(1 - 1/t) for t > 1. Catalog members
/// provide closed forms for U, F and, when gamma0 == 0, for the integral of U
/// over (0, t); user-defined members may give only `quantile`.
struct ReferenceDistribution {
  std::string name;
  double gamma0 = 0.0;
  std::function<double(double)> quantile;
  std::function<double(double)> tail_quantile;
  double left_endpoint = -std::numeric_limits<double>::infinity();
  double right_endpoint = std::numeric_limits<double>::infinity();
  std::function<double(double)> cdf;                 // optional
  std::function<double(double)> integrated_tail;     // optional, t -> int_0^t U(s) ds

  /// Fills in a missing tail_quantile from quantile.
  static ReferenceDistribution from_quantile(std::string name, double gamma0,
                                             std::function<double(double)> quantile,
                                             double left_endpoint, double right_endpoint);
};

struct NormalizingConstants {
  double a = 1.0;  // scale a_m > 0
  double b = 0.0;  // location b_m
  std::size_t m = 1;
};

/// a_m = a(m), b_m = U(m) with the scale function chosen by the sign of gamma0:
///   gamma0 > 0:  a(t) = gamma0 U(t)
///   gamma0 < 0:  a(t) = -gamma0 (U(inf) - U(t))
///   gamma0 = 0:  a(t) = U(t) - t^{-1} int_0^t U(s) ds
///
/// Throws ConfigError when the constants do not exist for this (dist, m), e.g.
/// a_m <= 0 at small m or a gamma0 = 0 member whose U is not integrable at 0.
[[nodiscard]] NormalizingConstants norm_constants(const ReferenceDistribution& dist, std::size_t m);

/// n draws quantile(U_i), deterministic in seed.
[[nodiscard]] std::vector<double> sample_iid(const ReferenceDistribution& dist, std::size_t n,
                                             std::uint64_t seed);

/// The built-in members: pareto(alpha = 1, 2), exponential, beta-tail(beta = 2),
/// cauchy and gev(gamma = -0.5, 0, 0.5, 1).
[[nodiscard]] std::vector<ReferenceDistribution> catalog();

[[nodiscard]] ReferenceDistribution pareto(double alpha);
[[nodiscard]] ReferenceDistribution exponential();
[[nodiscard]] ReferenceDistribution beta_tail(double beta);
[[nodiscard]] ReferenceDistribution cauchy();
[[nodiscard]] ReferenceDistribution gev_member(double gamma);

/// Parses `pareto:alpha=1`, `beta-tail:beta=2`, `exponential`, `cauchy`,
/// `gev:gamma=0.5`. Throws ConfigError for unknown or excluded laws (uniform).
[[nodiscard]] ReferenceDistribution parse_distribution(std::string_view spec);

}  // namespace gevmle
