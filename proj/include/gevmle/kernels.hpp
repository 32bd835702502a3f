#pragma once

// Data-parallel inner loops. Each kernel has a serial reference version and an
// OpenMP version; the serial one is the specification the tests compare to.

#include <cstddef>
#include <span>

#include "gevmle/gev.hpp"

namespace gevmle {

enum class Execution { serial, parallel };

namespace kernels::serial {

/// out[k] = max(data[k*m .. k*m + m - 1]) for k < out.size().
void block_maxima(std::span<const double> data, std::size_t m, std::span<double> out);

/// Sum of gev_loglik3 over data; -inf as soon as one point is infeasible.
[[nodiscard]] double sum_loglik(const GevParams& p, std::span<const double> data);

/// Sum of gev_loglik_gradient over data. Caller guarantees feasibility.
[[nodiscard]] Gradient3 sum_gradient(const GevParams& p, std::span<const double> data);

}  // namespace kernels::serial

namespace kernels::omp {

void block_maxima(std::span<const double> data, std::size_t m, std::span<double> out);
[[nodiscard]] double sum_loglik(const GevParams& p, std::span<const double> data);
[[nodiscard]] Gradient3 sum_gradient(const GevParams& p, std::span<const double> data);

/// Threads OpenMP will use for a parallel region (1 when built without OpenMP).
[[nodiscard]] int max_threads() noexcept;

}  // namespace kernels::omp

}  // namespace gevmle
