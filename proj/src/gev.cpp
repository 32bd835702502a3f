#include "gevmle/gev.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gevmle/rng.hpp"

namespace gevmle {

namespace {

bool near_zero(double gamma) noexcept { return std::abs(gamma) < kGammaZeroCutoff; }

// (1/gamma)(log(1 + gamma z)/gamma - z/(1 + gamma z)) without cancellation for
// small gamma*z; the series is sum_{k>=2} (-1)^k gamma^(k-2) z^k (k-1)/k.
double shape_term(double gamma, double z, double log_t, double t) noexcept {
  const double gz = gamma * z;
  if (near_zero(gamma) || std::abs(gz) < 1e-3) {
    double sum = 0.0;
    double power = z * z;  // gamma^(k-2) z^k, signed
    for (int k = 2; k <= 9; ++k) {
      sum += power * static_cast<double>(k - 1) / static_cast<double>(k);
      power *= -gz;
    }
    return sum;
  }
  return (log_t / gamma - z / t) / gamma;
}

}  // namespace

bool is_valid(const GevParams& p) noexcept {
  return std::isfinite(p.gamma) && std::isfinite(p.mu) && std::isfinite(p.sigma) && p.sigma > 0.0;
}

bool in_search_space(const GevParams& p) noexcept { return is_valid(p) && p.gamma > -1.0; }

SupportInterval gev_support(double gamma) noexcept {
  if (near_zero(gamma)) return {};
  if (gamma > 0.0) return {-1.0 / gamma, kPlusInf};
  return {kMinusInf, -1.0 / gamma};
}

SupportInterval gev_support(const GevParams& p) noexcept {
  const auto s = gev_support(p.gamma);
  return {p.mu + p.sigma * s.lower, p.mu + p.sigma * s.upper};
}

double gev_cdf(double gamma, double x) noexcept {
  if (near_zero(gamma)) return std::exp(-std::exp(-x));
  const double t = 1.0 + gamma * x;
  if (t <= 0.0) return gamma > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(gamma * x) / gamma));
}

double gev_quantile(double gamma, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("gev_quantile: probability must lie in (0, 1), got " + std::to_string(u));
  }
  const double e = -std::log(u);  // standard exponential variate
  if (near_zero(gamma)) return -std::log(e);
  return std::expm1(-gamma * std::log(e)) / gamma;
}

std::vector<double> gev_sample(const GevParams& p, std::size_t n, std::uint64_t seed) {
  if (!is_valid(p)) throw std::invalid_argument("gev_sample: sigma must be positive and finite");
  UniformStream uniform(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = p.mu + p.sigma * gev_quantile(p.gamma, uniform());
  return out;
}

double gev_loglik(double gamma, double x) noexcept {
  if (!std::isfinite(x)) return kMinusInf;
  if (near_zero(gamma)) return -x - std::exp(-x);
  const double t = 1.0 + gamma * x;
  if (!(t > 0.0)) return kMinusInf;
  const double log_t = std::log1p(gamma * x);
  return -log_t - log_t / gamma - std::exp(-log_t / gamma);
}

double gev_loglik3(const GevParams& p, double x) noexcept {
  return gev_loglik(p.gamma, (x - p.mu) / p.sigma) - std::log(p.sigma);
}

double gev_loglik_dx(double gamma, double x) {
  if (near_zero(gamma)) return std::exp(-x) - 1.0;
  const double t = 1.0 + gamma * x;
  if (!(t > 0.0)) throw std::domain_error("gev_loglik_dx: x outside the support");
  const double w = std::exp(-std::log1p(gamma * x) / gamma);
  return (w - 1.0 - gamma) / t;
}

Gradient3 gev_loglik_gradient(const GevParams& p, double x) {
  if (!is_valid(p)) throw std::domain_error("gev_loglik_gradient: invalid parameters");
  const double z = (x - p.mu) / p.sigma;
  const double gamma = p.gamma;
  double t, log_t, w;
  if (near_zero(gamma)) {
    if (!std::isfinite(z)) throw std::domain_error("gev_loglik_gradient: x outside the support");
    t = 1.0;
    log_t = 0.0;
    w = std::exp(-z);
  } else {
    t = 1.0 + gamma * z;
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::domain_error("gev_loglik_gradient: x is not interior to the support");
    }
    log_t = std::log1p(gamma * z);
    w = std::exp(-log_t / gamma);
  }
  const double dz = (w - 1.0 - gamma) / t;  // d l_gamma / dz
  const double d_gamma = (1.0 - w) * shape_term(gamma, z, log_t, t) - z / t;
  const double d_mu = -dz / p.sigma;
  const double d_sigma = (-z * dz - 1.0) / p.sigma;
  return {d_gamma, d_mu, d_sigma};
}

double gev_mode(double gamma) {
  if (!(gamma > -1.0)) throw std::domain_error("gev_mode: requires gamma > -1");
  if (near_zero(gamma)) return 0.0;
  return std::expm1(-gamma * std::log1p(gamma)) / gamma;
}

double gev_loglik_max(double gamma) {
  if (!(gamma > -1.0)) throw std::domain_error("gev_loglik_max: requires gamma > -1");
  return (1.0 + gamma) * (std::log1p(gamma) - 1.0);
}

}  // namespace gevmle
