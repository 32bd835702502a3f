#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gevmle/gev.hpp"
#include "gevmle/kernels.hpp"
#include "gevmle/reference.hpp"

namespace gevmle {

class EmptySeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maxima M_{1,m}, ..., M_{n,m} of consecutive length-m blocks; n = source_length / m.
struct BlockMaximaSeries {
  std::vector<double> values;
  std::size_t block_length = 1;
  std::size_t source_length = 0;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// (M_{k,m} - b_m) / a_m together with the constants used.
struct NormalizedSeries {
  std::vector<double> values;
  NormalizingConstants constants;
};

/// Equal-weight point masses at the (sorted) points.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::vector<double> points);

  [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
  [[nodiscard]] double weight() const noexcept { return 1.0 / static_cast<double>(points_.size()); }

 private:
  std::vector<double> points_;
};

/// Trailing data that does not fill a whole block is dropped.
/// Throws EmptySeriesError when data.size() < m.
[[nodiscard]] BlockMaximaSeries block_maxima(std::span<const double> data, std::size_t m,
                                             Execution exec = Execution::parallel);

/// Same law as block_maxima(sample_iid(dist, n * m, seed), m) and the same
/// values for the same seed, without materializing the n * m raw draws: the
/// maximum of a block is the quantile of the block's largest uniform.
[[nodiscard]] BlockMaximaSeries simulate_block_maxima(const ReferenceDistribution& dist, std::size_t n,
                                                      std::size_t m, std::uint64_t seed);

/// Throws std::invalid_argument when constants.m != series.block_length.
[[nodiscard]] NormalizedSeries normalize(const BlockMaximaSeries& series, const NormalizingConstants& constants);
[[nodiscard]] std::vector<double> denormalize(const NormalizedSeries& series);

/// Fraction of points <= t.
[[nodiscard]] double empirical_cdf(const EmpiricalMeasure& measure, double t) noexcept;

/// sup_t |F_n(t) - F_gamma(t)|, evaluated on both sides of every jump.
/// Throws EmptySeriesError for an empty measure.
[[nodiscard]] double ks_distance(const EmpiricalMeasure& measure, double gamma);

/// (1/n) sum l_theta(points); -inf if any point is outside the support of theta.
[[nodiscard]] double empirical_mean_loglik(const EmpiricalMeasure& measure, const GevParams& theta,
                                           Execution exec = Execution::serial);

}  // namespace gevmle
