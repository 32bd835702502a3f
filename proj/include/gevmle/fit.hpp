#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>

#include "gevmle/blocks.hpp"
#include "gevmle/gev.hpp"

namespace gevmle {

class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Search box for the shape parameter: gamma in (kGammaFloor, kGammaCeiling].
inline constexpr double kGammaFloor = -1.0 + 1e-6;
inline constexpr double kGammaCeiling = 10.0;

enum class FitStatus {
  converged,
  max_iterations,
  boundary,           // search ended at gamma -> -1, the gamma clamp, or the edge of the feasible set
  plateau,            // simplex collapsed but the gradient is not small
  not_negative_definite,
};

[[nodiscard]] std::string_view to_string(FitStatus s) noexcept;

struct FitOptions {
  double grad_tol = 1e-8;  // on the mean log-likelihood scale
  std::size_t max_iters = 500;
  std::optional<GevParams> init;
};

struct FitResult {
  GevParams theta_hat;
  double loglik = kMinusInf;     // mean log-likelihood L_n at theta_hat
  double grad_norm = kPlusInf;   // Euclidean norm of grad L_n in (gamma, mu, sigma)
  bool hessian_negdef = false;
  double hessian_max_eigenvalue = 0.0;  // < 0 when negdef; -value is the reported margin
  std::size_t n_blocks = 0;
  bool converged = false;
  std::size_t iterations = 0;
  FitStatus status = FitStatus::max_iterations;
  GevParams init;
  double init_loglik = kMinusInf;
};

/// Mean of gev_loglik3 over the observations; -inf if any is infeasible.
[[nodiscard]] double sample_loglik(const GevParams& theta, std::span<const double> data);
[[nodiscard]] double sample_loglik(const GevParams& theta, const BlockMaximaSeries& series);

/// Mean of gev_loglik_gradient; throws std::domain_error if theta is infeasible.
[[nodiscard]] Gradient3 sample_loglik_gradient(const GevParams& theta, std::span<const double> data);

/// min_k (1 + gamma (x_k - mu) / sigma) > 0, i.e. every observation is inside the support.
[[nodiscard]] bool strictly_feasible(const GevParams& theta, std::span<const double> data) noexcept;

/// Probability-weighted-moment starting point (Hosking, Wallis and Wood 1985),
/// with gamma clamped to [-0.95, 5] and repaired until feasible for the data.
[[nodiscard]] GevParams pwm_init(std::span<const double> data);

/// Local maximizer of sample_loglik over gamma in (-1 + 1e-6, 10], mu real,
/// sigma > 0. Never throws on non-convergence; inspect `converged`/`status`.
/// Throws DegenerateDataError for constant data and std::invalid_argument for
/// fewer than 3 or non-finite observations.
[[nodiscard]] FitResult fit_mle(std::span<const double> data, const FitOptions& options = {});

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Central-difference Hessian of sample_loglik in (gamma, mu, sigma).
/// Throws std::domain_error when theta is not strictly feasible.
[[nodiscard]] Matrix3 numeric_hessian(const GevParams& theta, std::span<const double> data);

/// Ascending eigenvalues of a symmetric 3x3 matrix.
[[nodiscard]] std::array<double, 3> symmetric_eigenvalues(const Matrix3& m);

/// KL(G_theta0 || G_theta) = E_theta0[l_theta0 - l_theta]; +inf when the
/// support of theta0 is not contained in the support of theta.
[[nodiscard]] double kl_divergence(const GevParams& theta0, const GevParams& theta);

}  // namespace gevmle
