#include "gevmle/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gevmle {

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
}

BlockMaximaSeries block_maxima(std::span<const double> data, std::size_t m, Execution exec) {
  if (m < 1) throw std::invalid_argument("block_maxima: block length must be >= 1");
  if (data.size() < m) {
    throw EmptySeriesError("block_maxima: " + std::to_string(data.size()) +
                           " values cannot fill one block of length " + std::to_string(m));
  }
  BlockMaximaSeries out;
  out.block_length = m;
  out.source_length = data.size();
  out.values.resize(data.size() / m);
  if (exec == Execution::parallel) {
    kernels::omp::block_maxima(data, m, out.values);
  } else {
    kernels::serial::block_maxima(data, m, out.values);
  }
  return out;
}

BlockMaximaSeries simulate_block_maxima(const ReferenceDistribution& dist, std::size_t n, std::size_t m,
                                        std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("simulate_block_maxima: n and m must be >= 1");
  UniformStream uniform(seed);
  BlockMaximaSeries out;
  out.block_length = m;
  out.source_length = n * m;
  out.values.resize(n);
  for (auto& v : out.values) {
    double top = 0.0;
    for (std::size_t i = 0; i < m; ++i) top = std::max(top, uniform());
    v = dist.quantile(top);
  }
  return out;
}

NormalizedSeries normalize(const BlockMaximaSeries& series, const NormalizingConstants& constants) {
  if (constants.m != series.block_length) {
    throw std::invalid_argument("normalize: constants are for m = " + std::to_string(constants.m) +
                                " but the series has block length " + std::to_string(series.block_length));
  }
  if (!(constants.a > 0.0)) throw std::invalid_argument("normalize: scale a_m must be positive");
  NormalizedSeries out;
  out.constants = constants;
  out.values.reserve(series.size());
  for (double x : series.values) out.values.push_back((x - constants.b) / constants.a);
  return out;
}

std::vector<double> denormalize(const NormalizedSeries& series) {
  std::vector<double> out;
  out.reserve(series.values.size());
  for (double z : series.values) out.push_back(series.constants.a * z + series.constants.b);
  return out;
}

double empirical_cdf(const EmpiricalMeasure& measure, double t) noexcept {
  if (measure.empty()) return 0.0;
  const auto pts = measure.points();
  const auto count = std::upper_bound(pts.begin(), pts.end(), t) - pts.begin();
  return static_cast<double>(count) / static_cast<double>(pts.size());
}

double ks_distance(const EmpiricalMeasure& measure, double gamma) {
  if (measure.empty()) throw EmptySeriesError("ks_distance: empty measure");
  const auto pts = measure.points();
  const double n = static_cast<double>(pts.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double f = gev_cdf(gamma, pts[i]);
    const double before = static_cast<double>(i) / n;  // F_n just left of the jump
    const double after = static_cast<double>(i + 1) / n;
    sup = std::max({sup, f - before, after - f});
  }
  return sup;
}

double empirical_mean_loglik(const EmpiricalMeasure& measure, const GevParams& theta, Execution exec) {
  if (measure.empty()) return kMinusInf;
  const double sum = exec == Execution::parallel ? kernels::omp::sum_loglik(theta, measure.points())
                                                 : kernels::serial::sum_loglik(theta, measure.points());
  return sum / static_cast<double>(measure.size());
}

}  // namespace gevmle
