#include "gevmle/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "gevmle/kernels.hpp"
#include "gevmle/quadrature.hpp"

namespace gevmle {

std::string_view to_string(FitStatus s) noexcept {
  switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max_iterations";
    case FitStatus::boundary: return "boundary";
    case FitStatus::plateau: return "plateau";
    case FitStatus::not_negative_definite: return "not_negative_definite";
  }
  return "unknown";
}

double sample_loglik(const GevParams& theta, std::span<const double> data) {
  if (data.empty()) throw std::invalid_argument("sample_loglik: empty series");
  if (!is_valid(theta)) return kMinusInf;
  return kernels::serial::sum_loglik(theta, data) / static_cast<double>(data.size());
}

double sample_loglik(const GevParams& theta, const BlockMaximaSeries& series) {
  return sample_loglik(theta, series.values);
}

Gradient3 sample_loglik_gradient(const GevParams& theta, std::span<const double> data) {
  if (data.empty()) throw std::invalid_argument("sample_loglik_gradient: empty series");
  auto g = kernels::serial::sum_gradient(theta, data);
  const double n = static_cast<double>(data.size());
  for (auto& v : g) v /= n;
  return g;
}

bool strictly_feasible(const GevParams& theta, std::span<const double> data) noexcept {
  if (!is_valid(theta)) return false;
  const auto support = gev_support(theta);
  return std::all_of(data.begin(), data.end(), [&](double x) { return support.contains(x); }) &&
         std::all_of(data.begin(), data.end(), [&](double x) { return std::isfinite(gev_loglik3(theta, x)); });
}

namespace {

double norm3(const Gradient3& g) { return std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]); }

void validate_data(std::span<const double> data) {
  if (data.size() < 3) {
    throw std::invalid_argument("fit: need at least 3 observations, got " + std::to_string(data.size()));
  }
  if (!std::all_of(data.begin(), data.end(), [](double x) { return std::isfinite(x); })) {
    throw std::invalid_argument("fit: observations must be finite");
  }
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  if (*lo == *hi) throw DegenerateDataError("fit: data are constant");
}

double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

// Shrink gamma toward 0 and inflate sigma until every observation is inside the support.
GevParams repair_feasibility(GevParams p, std::span<const double> data) {
  for (int i = 0; i < 64 && !strictly_feasible(p, data); ++i) {
    p.gamma *= 0.5;
    p.sigma *= 2.0;
  }
  if (!strictly_feasible(p, data)) p.gamma = 0.0;
  return p;
}

// Largest relative change of t_k = 1 + gamma (x_k - mu) / sigma per unit move of
// (gamma, mu, sigma). Finite-difference steps are capped by it so that no
// observation close to the support edge is pushed across a large fraction of
// its distance to the edge.
std::array<double, 3> edge_sensitivity(const GevParams& p, std::span<const double> data) {
  std::array<double, 3> r{0.0, 0.0, 0.0};
  for (double x : data) {
    const double z = (x - p.mu) / p.sigma;
    const double t = 1.0 + p.gamma * z;
    r[0] = std::max(r[0], std::abs(z) / t);
    r[1] = std::max(r[1], std::abs(p.gamma) / (p.sigma * t));
    r[2] = std::max(r[2], std::abs(p.gamma * z) / (p.sigma * t));
  }
  return r;
}

constexpr double kEdgeStepFraction = 1e-3;

double capped_step(double base, double sensitivity) {
  return sensitivity > 0.0 ? std::min(base, kEdgeStepFraction / sensitivity) : base;
}

}  // namespace

GevParams pwm_init(std::span<const double> data) {
  validate_data(data);
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());

  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double r = static_cast<double>(j);  // j - 1 in 1-based ranks
    b0 += x[j];
    b1 += r / (n - 1.0) * x[j];
    b2 += r * (r - 1.0) / ((n - 1.0) * (n - 2.0)) * x[j];
  }
  b0 /= n;
  b1 /= n;
  b2 /= n;

  const double l2 = 2.0 * b1 - b0;  // second L-moment, > 0 for nonconstant data
  const double c = l2 / (3.0 * b2 - b0) - std::numbers::ln2 / std::log(3.0);
  const double k = 7.8590 * c + 2.9554 * c * c;
  double gamma = std::isfinite(k) ? std::clamp(-k, -0.95, 5.0) : 0.0;

  GevParams p{gamma, b0, l2 / std::numbers::ln2};
  if (std::abs(gamma) < 1e-6) {
    p.gamma = 0.0;
    p.sigma = l2 / std::numbers::ln2;
    p.mu = b0 - std::numbers::egamma * p.sigma;
  } else if (gamma < 0.9) {
    const double kk = -gamma;
    const double g1k = std::tgamma(1.0 + kk);
    p.sigma = l2 * kk / (g1k * -std::expm1(-kk * std::numbers::ln2));
    p.mu = b0 + p.sigma * (g1k - 1.0) / kk;
  } else {
    // Moments of order one do not exist for gamma >= 1; match the quartiles instead.
    const double q1 = gev_quantile(gamma, 0.25), q3 = gev_quantile(gamma, 0.75);
    p.sigma = (sorted_quantile(x, 0.75) - sorted_quantile(x, 0.25)) / (q3 - q1);
    p.mu = sorted_quantile(x, 0.25) - p.sigma * q1;
  }
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma) || !std::isfinite(p.mu)) {
    p = {0.0, b0, std::max(l2, (x.back() - x.front()) * 0.1) / std::numbers::ln2};
  }
  return repair_feasibility(p, data);
}

Matrix3 numeric_hessian(const GevParams& theta, std::span<const double> data) {
  if (!strictly_feasible(theta, data)) throw std::domain_error("numeric_hessian: theta is infeasible for the data");
  auto f = [&](const std::array<double, 3>& v) { return sample_loglik(GevParams{v[0], v[1], v[2]}, data); };
  const std::array<double, 3> x{theta.gamma, theta.mu, theta.sigma};
  const auto r = edge_sensitivity(theta, data);
  std::array<double, 3> h{capped_step(1e-4 * (1.0 + std::abs(theta.gamma)), r[0]),
                          capped_step(1e-4 * theta.sigma, r[1]), capped_step(1e-4 * theta.sigma, r[2])};

  // Shrink a step until both neighbours stay feasible.
  for (int i = 0; i < 3; ++i) {
    for (int tries = 0; tries < 30; ++tries) {
      auto up = x, down = x;
      up[i] += h[i];
      down[i] -= h[i];
      if (std::isfinite(f(up)) && std::isfinite(f(down))) break;
      h[i] *= 0.5;
    }
  }

  const double f0 = f(x);
  Matrix3 H{};
  for (int i = 0; i < 3; ++i) {
    auto up = x, down = x;
    up[i] += h[i];
    down[i] -= h[i];
    H[i][i] = (f(up) - 2.0 * f0 + f(down)) / (h[i] * h[i]);
    for (int j = i + 1; j < 3; ++j) {
      auto pp = x, pm = x, mp = x, mm = x;
      pp[i] += h[i]; pp[j] += h[j];
      pm[i] += h[i]; pm[j] -= h[j];
      mp[i] -= h[i]; mp[j] += h[j];
      mm[i] -= h[i]; mm[j] -= h[j];
      const double v = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[i] * h[j]);
      H[i][j] = v;
      H[j][i] = v;
    }
  }
  return H;
}

std::array<double, 3> symmetric_eigenvalues(const Matrix3& m) {
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = m[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(a, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

namespace {

// Optimizer coordinates: z = (gamma, (mu - mu0) / s0, log(sigma / s0)).
// They make the search equivariant under affine maps of the data and keep sigma > 0.
struct Chart {
  double mu0;
  double s0;

  [[nodiscard]] GevParams to_params(const Eigen::Vector3d& z) const {
    return {z(0), mu0 + s0 * z(1), s0 * std::exp(z(2))};
  }
  [[nodiscard]] Eigen::Vector3d to_chart(const GevParams& p) const {
    return {p.gamma, (p.mu - mu0) / s0, std::log(p.sigma / s0)};
  }
};

class Objective {
 public:
  Objective(std::span<const double> data, Chart chart) : data_(data), chart_(chart) {}

  // Mean log-likelihood, -inf outside the search box or the feasible set.
  [[nodiscard]] double value(const Eigen::Vector3d& z) const {
    if (!(z(0) > kGammaFloor) || z(0) > kGammaCeiling || !z.allFinite()) return kMinusInf;
    return sample_loglik(chart_.to_params(z), data_);
  }

  // Gradient of the mean log-likelihood in chart coordinates.
  [[nodiscard]] Eigen::Vector3d gradient(const Eigen::Vector3d& z) const {
    const auto p = chart_.to_params(z);
    const auto g = sample_loglik_gradient(p, data_);
    return {g[0], chart_.s0 * g[1], p.sigma * g[2]};
  }

  [[nodiscard]] const Chart& chart() const { return chart_; }

 private:
  std::span<const double> data_;
  Chart chart_;
};

struct SimplexOutcome {
  Eigen::Vector3d best;
  double best_value;
  std::size_t iterations;
  bool collapsed;
};

// Nelder-Mead on the negated objective, standard coefficients (1, 2, 1/2, 1/2).
SimplexOutcome nelder_mead(const Objective& obj, const Eigen::Vector3d& start, double step, std::size_t budget) {
  constexpr int dim = 3;
  std::array<Eigen::Vector3d, dim + 1> pts;
  std::array<double, dim + 1> val;  // negated log-likelihood; +inf when infeasible
  auto cost = [&](const Eigen::Vector3d& z) { return -obj.value(z); };

  pts[0] = start;
  for (int i = 0; i < dim; ++i) {
    pts[i + 1] = start;
    double s = step;
    if (i == 0 && start(0) + s > kGammaCeiling) s = -s;
    pts[i + 1](i) += s;
  }
  for (int i = 0; i <= dim; ++i) val[i] = cost(pts[i]);

  std::array<int, dim + 1> order{};
  std::size_t iter = 0;
  bool collapsed = false;
  for (; iter < budget; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return val[a] < val[b]; });
    const int best = order[0], worst = order[dim], second = order[dim - 1];

    double diameter = 0.0;
    for (int i = 1; i <= dim; ++i) diameter = std::max(diameter, (pts[order[i]] - pts[best]).lpNorm<Eigen::Infinity>());
    const double spread = val[worst] - val[best];
    if (diameter < 1e-12) {
      collapsed = true;
      break;
    }
    if (diameter < 1e-7 || (std::isfinite(spread) && spread <= 1e-15 * (1.0 + std::abs(val[best])) && diameter < 1e-5)) {
      break;
    }

    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i = 0; i < dim; ++i) centroid += pts[order[i]];
    centroid /= dim;

    const Eigen::Vector3d reflected = centroid + (centroid - pts[worst]);
    const double f_r = cost(reflected);
    if (f_r < val[best]) {
      const Eigen::Vector3d expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double f_e = cost(expanded);
      if (f_e < f_r) {
        pts[worst] = expanded;
        val[worst] = f_e;
      } else {
        pts[worst] = reflected;
        val[worst] = f_r;
      }
      continue;
    }
    if (f_r < val[second]) {
      pts[worst] = reflected;
      val[worst] = f_r;
      continue;
    }
    const bool outside = f_r < val[worst];
    const Eigen::Vector3d contracted =
        outside ? Eigen::Vector3d(centroid + 0.5 * (reflected - centroid))
                : Eigen::Vector3d(centroid + 0.5 * (pts[worst] - centroid));
    const double f_c = cost(contracted);
    if (f_c < (outside ? f_r : val[worst])) {
      pts[worst] = contracted;
      val[worst] = f_c;
      continue;
    }
    for (int i = 1; i <= dim; ++i) {
      const int k = order[i];
      pts[k] = pts[best] + 0.5 * (pts[k] - pts[best]);
      val[k] = cost(pts[k]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  return {pts[best], -val[best], iter, collapsed};
}

// Hessian of the chart objective by central differences of the analytic gradient.
std::optional<Eigen::Matrix3d> gradient_hessian(const Objective& obj, const Eigen::Vector3d& z,
                                                std::span<const double> data) {
  const auto p = obj.chart().to_params(z);
  const auto r = edge_sensitivity(p, data);
  const std::array<double, 3> h{capped_step(1e-5, r[0]), capped_step(1e-5, obj.chart().s0 * r[1]),
                                capped_step(1e-5, p.sigma * r[2])};
  Eigen::Matrix3d H;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d up = z, down = z;
    up(i) += h[i];
    down(i) -= h[i];
    if (!std::isfinite(obj.value(up)) || !std::isfinite(obj.value(down))) return std::nullopt;
    H.col(i) = (obj.gradient(up) - obj.gradient(down)) / (2.0 * h[i]);
  }
  return Eigen::Matrix3d(0.5 * (H + H.transpose()));
}

double original_grad_norm(const Objective& obj, const Eigen::Vector3d& z, std::span<const double> data) {
  return norm3(sample_loglik_gradient(obj.chart().to_params(z), data));
}

}  // namespace

FitResult fit_mle(std::span<const double> data, const FitOptions& options) {
  validate_data(data);
  if (!(options.grad_tol > 0.0)) throw std::invalid_argument("fit_mle: grad_tol must be positive");

  FitResult result;
  result.n_blocks = data.size();
  GevParams init = options.init ? *options.init : pwm_init(data);
  if (!is_valid(init)) throw std::invalid_argument("fit_mle: initial parameters are invalid");
  init.gamma = std::clamp(init.gamma, kGammaFloor + 0.05, kGammaCeiling);
  init = repair_feasibility(init, data);
  result.init = init;
  result.init_loglik = sample_loglik(init, data);

  const Objective obj(data, Chart{init.mu, init.sigma});
  const std::size_t budget = options.max_iters;
  std::size_t used = 0;

  auto simplex = nelder_mead(obj, obj.chart().to_chart(init), 0.1, budget);
  used += simplex.iterations;
  Eigen::Vector3d z = simplex.best;
  double value = simplex.best_value;
  bool collapsed = simplex.collapsed;

  // Newton polish on the analytic gradient.
  double grad_norm = original_grad_norm(obj, z, data);
  while (grad_norm > options.grad_tol && used < budget) {
    const auto H = gradient_hessian(obj, z, data);
    if (!H) break;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(*H, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().maxCoeff() < 0.0)) {
      // Not locally concave yet: another simplex pass from the current point.
      auto again = nelder_mead(obj, z, 0.05, budget - used);
      used += std::max<std::size_t>(again.iterations, 1);
      collapsed = collapsed || again.collapsed;
      if (!(again.best_value > value)) break;
      z = again.best;
      value = again.best_value;
      grad_norm = original_grad_norm(obj, z, data);
      continue;
    }
    const Eigen::Vector3d step = -H->ldlt().solve(obj.gradient(z));
    ++used;
    bool accepted = false;
    double scale = 1.0;
    for (int k = 0; k < 40; ++k, scale *= 0.5) {
      const Eigen::Vector3d trial = z + scale * step;
      const double v = obj.value(trial);
      if (std::isfinite(v) && v >= value - 1e-13 * (1.0 + std::abs(value))) {
        const double gn = original_grad_norm(obj, trial, data);
        if (gn < grad_norm || v > value) {
          z = trial;
          value = v;
          grad_norm = gn;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) break;
  }

  const GevParams theta = obj.chart().to_params(z);
  result.theta_hat = theta;
  result.loglik = sample_loglik(theta, data);
  result.iterations = used;
  result.grad_norm = std::isfinite(result.loglik) ? norm3(sample_loglik_gradient(theta, data)) : kPlusInf;

  double min_margin = kPlusInf;  // min_k (1 + gamma z_k)
  for (double x : data) min_margin = std::min(min_margin, 1.0 + theta.gamma * (x - theta.mu) / theta.sigma);
  const bool at_boundary =
      theta.gamma < -1.0 + 1e-3 || theta.gamma > kGammaCeiling - 1e-3 || (theta.gamma != 0.0 && min_margin < 1e-8);

  if (strictly_feasible(theta, data) && !at_boundary) {
    const auto ev = symmetric_eigenvalues(numeric_hessian(theta, data));
    result.hessian_max_eigenvalue = ev[2];
    result.hessian_negdef = ev[2] < 0.0;
  }

  const bool small_gradient = result.grad_norm <= options.grad_tol;
  if (at_boundary) {
    result.status = FitStatus::boundary;
  } else if (small_gradient && result.hessian_negdef) {
    result.status = FitStatus::converged;
  } else if (small_gradient) {
    result.status = FitStatus::not_negative_definite;
  } else if (used >= budget && !collapsed) {
    result.status = FitStatus::max_iterations;
  } else {
    result.status = FitStatus::plateau;
  }
  result.converged = result.status == FitStatus::converged;
  return result;
}

double kl_divergence(const GevParams& theta0, const GevParams& theta) {
  if (!is_valid(theta0) || !is_valid(theta)) throw std::invalid_argument("kl_divergence: sigma must be positive");
  if (theta0 == theta) return 0.0;

  const auto s0 = gev_support(theta0);
  const auto s = gev_support(theta);
  const double slack = 1e-12 * (std::abs(theta0.mu) + theta0.sigma);
  if (s0.lower < s.lower - slack || s0.upper > s.upper + slack) return kPlusInf;

  // Integrate over u = G_theta0(x) in (0, 1).
  auto integrand = [&](double u) {
    const double x = theta0.mu + theta0.sigma * gev_quantile(theta0.gamma, u);
    return gev_loglik3(theta0, x) - gev_loglik3(theta, x);
  };
  const auto r = integrate(integrand, 0.0, 1.0, 1e-10);
  return std::max(0.0, r.value);
}

}  // namespace gevmle
