#include "gevmle/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gevmle {

namespace {

// Below this many points the parallel region costs more than it saves.
constexpr std::ptrdiff_t kParallelGrain = 4096;

}  // namespace

namespace kernels::serial {

void block_maxima(std::span<const double> data, std::size_t m, std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto block = data.subspan(k * m, m);
    out[k] = *std::max_element(block.begin(), block.end());
  }
}

double sum_loglik(const GevParams& p, std::span<const double> data) {
  double sum = 0.0;
  for (double x : data) {
    const double l = gev_loglik3(p, x);
    if (l == kMinusInf) return kMinusInf;
    sum += l;
  }
  return sum;
}

Gradient3 sum_gradient(const GevParams& p, std::span<const double> data) {
  Gradient3 g{0.0, 0.0, 0.0};
  for (double x : data) {
    const auto gi = gev_loglik_gradient(p, x);
    g[0] += gi[0];
    g[1] += gi[1];
    g[2] += gi[2];
  }
  return g;
}

}  // namespace kernels::serial

namespace kernels::omp {

void block_maxima(std::span<const double> data, std::size_t m, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (n * static_cast<std::ptrdiff_t>(m) >= kParallelGrain)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const double* first = data.data() + static_cast<std::size_t>(k) * m;
    out[static_cast<std::size_t>(k)] = *std::max_element(first, first + m);
  }
}

double sum_loglik(const GevParams& p, std::span<const double> data) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
  double sum = 0.0;
  int infeasible = 0;
#pragma omp parallel for schedule(static) reduction(+ : sum) reduction(| : infeasible) if (n >= kParallelGrain)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double l = gev_loglik3(p, data[static_cast<std::size_t>(i)]);
    if (l == kMinusInf) {
      infeasible |= 1;
    } else {
      sum += l;
    }
  }
  return infeasible ? kMinusInf : sum;
}

Gradient3 sum_gradient(const GevParams& p, std::span<const double> data) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
  double g0 = 0.0, g1 = 0.0, g2 = 0.0;
  int failed = 0;
#pragma omp parallel for schedule(static) reduction(+ : g0, g1, g2) reduction(| : failed) if (n >= kParallelGrain)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto gi = gev_loglik_gradient(p, data[static_cast<std::size_t>(i)]);
      g0 += gi[0];
      g1 += gi[1];
      g2 += gi[2];
    } catch (const std::domain_error&) {
      failed |= 1;
    }
  }
  if (failed) throw std::domain_error("sum_gradient: a point is not interior to the support");
  return {g0, g1, g2};
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace kernels::omp

}  // namespace gevmle
