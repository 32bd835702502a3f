#include "gevmle/reference.hpp"

#include <cmath>
#include <numbers>

#include "gevmle/gev.hpp"
#include "gevmle/io.hpp"
#include "gevmle/quadrature.hpp"

namespace gevmle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double scale_function_gamma_zero(const ReferenceDistribution& dist, double t) {
  double integral = 0.0;
  if (dist.integrated_tail) {
    integral = dist.integrated_tail(t);
  } else {
    // U(s) on (0, 1] sits at the left endpoint of F.
    if (!std::isfinite(dist.left_endpoint)) {
      throw ConfigError(dist.name + ": U is not integrable near 0 (left endpoint is -inf)");
    }
    integral = dist.left_endpoint;
    if (t > 1.0) {
      const auto r = integrate(dist.tail_quantile, 1.0, t, 1e-12);
      if (!(r.error <= 1e-10 * std::max(1.0, std::abs(r.value)))) {
        throw ConfigError(dist.name + ": quadrature of U did not reach tolerance");
      }
      integral += r.value;
    }
  }
  return dist.tail_quantile(t) - integral / t;
}

}  // namespace

ReferenceDistribution ReferenceDistribution::from_quantile(std::string name, double gamma0,
                                                           std::function<double(double)> quantile,
                                                           double left_endpoint, double right_endpoint) {
  ReferenceDistribution d;
  d.name = std::move(name);
  d.gamma0 = gamma0;
  d.quantile = std::move(quantile);
  d.tail_quantile = [q = d.quantile](double t) { return q(1.0 - 1.0 / t); };
  d.left_endpoint = left_endpoint;
  d.right_endpoint = right_endpoint;
  return d;
}

NormalizingConstants norm_constants(const ReferenceDistribution& dist, std::size_t m) {
  if (m < 1) throw std::invalid_argument("norm_constants: block length must be >= 1");
  if (!dist.tail_quantile) throw ConfigError(dist.name + ": no tail quantile function");
  const double t = static_cast<double>(m);
  const double u = dist.tail_quantile(t);

  double a = 0.0;
  if (dist.gamma0 > 0.0) {
    a = dist.gamma0 * u;
  } else if (dist.gamma0 < 0.0) {
    if (!std::isfinite(dist.right_endpoint)) {
      throw ConfigError(dist.name + ": gamma0 < 0 requires a finite right endpoint");
    }
    a = -dist.gamma0 * (dist.right_endpoint - u);
  } else {
    a = scale_function_gamma_zero(dist, t);
  }
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(u)) {
    throw ConfigError(dist.name + ": no positive scale a_m at m = " + std::to_string(m));
  }
  return {a, u, m};
}

std::vector<double> sample_iid(const ReferenceDistribution& dist, std::size_t n, std::uint64_t seed) {
  UniformStream uniform(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = dist.quantile(uniform());
  return out;
}

ReferenceDistribution pareto(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("pareto: alpha must be positive");
  ReferenceDistribution d;
  d.name = "pareto:alpha=" + format_double(alpha);
  d.gamma0 = 1.0 / alpha;
  d.quantile = [alpha](double u) { return std::exp(-std::log1p(-u) / alpha); };
  d.tail_quantile = [alpha](double t) { return std::pow(t, 1.0 / alpha); };
  d.cdf = [alpha](double x) { return x <= 1.0 ? 0.0 : -std::expm1(-alpha * std::log(x)); };
  d.left_endpoint = 1.0;
  d.right_endpoint = kInf;
  return d;
}

ReferenceDistribution exponential() {
  ReferenceDistribution d;
  d.name = "exponential";
  d.gamma0 = 0.0;
  d.quantile = [](double u) { return -std::log1p(-u); };
  d.tail_quantile = [](double t) { return std::log(t); };
  d.integrated_tail = [](double t) { return t * std::log(t) - t; };
  d.cdf = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
  d.left_endpoint = 0.0;
  d.right_endpoint = kInf;
  return d;
}

ReferenceDistribution beta_tail(double beta) {
  if (!(beta > 1.0)) {
    throw ConfigError("beta-tail: beta must exceed 1 (beta = 1 is the uniform law, gamma0 = -1)");
  }
  ReferenceDistribution d;
  d.name = "beta-tail:beta=" + format_double(beta);
  d.gamma0 = -1.0 / beta;
  d.quantile = [beta](double u) { return -std::expm1(std::log1p(-u) / beta); };
  d.tail_quantile = [beta](double t) { return -std::expm1(-std::log(t) / beta); };
  d.cdf = [beta](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return -std::expm1(beta * std::log1p(-x));
  };
  d.left_endpoint = 0.0;
  d.right_endpoint = 1.0;
  return d;
}

ReferenceDistribution cauchy() {
  using std::numbers::pi;
  ReferenceDistribution d;
  d.name = "cauchy";
  d.gamma0 = 1.0;
  d.quantile = [](double u) { return std::tan(pi * (u - 0.5)); };
  d.tail_quantile = [](double t) { return 1.0 / std::tan(pi / t); };
  d.cdf = [](double x) { return 0.5 + std::atan(x) / pi; };
  d.left_endpoint = -kInf;
  d.right_endpoint = kInf;
  return d;
}

ReferenceDistribution gev_member(double gamma) {
  if (!(gamma > -1.0)) throw ConfigError("gev: gamma must exceed -1");
  ReferenceDistribution d;
  d.name = "gev:gamma=" + format_double(gamma);
  d.gamma0 = gamma;
  d.quantile = [gamma](double u) { return gev_quantile(gamma, u); };
  d.tail_quantile = [gamma](double t) {
    const double e = -std::log1p(-1.0 / t);
    if (std::abs(gamma) < kGammaZeroCutoff) return -std::log(e);
    return std::expm1(-gamma * std::log(e)) / gamma;
  };
  d.cdf = [gamma](double x) { return gev_cdf(gamma, x); };
  const auto support = gev_support(gamma);
  d.left_endpoint = support.lower;
  d.right_endpoint = support.upper;
  return d;
}

std::vector<ReferenceDistribution> catalog() {
  return {pareto(1.0),        pareto(2.0),    exponential(),    beta_tail(2.0), cauchy(),
          gev_member(-0.5), gev_member(0.0), gev_member(0.5), gev_member(1.0)};
}

ReferenceDistribution parse_distribution(std::string_view spec) {
  KeyedSpec parsed;
  try {
    parsed = parse_keyed_spec(spec);
  } catch (const ParseError& e) {
    throw ConfigError("bad distribution spec '" + std::string(spec) + "': " + e.what());
  }
  auto expect_keys = [&](std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : parsed.params) {
      bool ok = false;
      for (auto a : allowed) ok = ok || key == a;
      if (!ok) throw ConfigError("distribution '" + parsed.head + "' has no parameter '" + key + "'");
    }
  };

  const auto& head = parsed.head;
  if (head == "pareto") {
    expect_keys({"alpha"});
    return pareto(parsed.get("alpha", 1.0));
  }
  if (head == "exponential") {
    expect_keys({});
    return exponential();
  }
  if (head == "beta-tail") {
    expect_keys({"beta"});
    return beta_tail(parsed.get("beta", 2.0));
  }
  if (head == "cauchy") {
    expect_keys({});
    return cauchy();
  }
  if (head == "gev") {
    expect_keys({"gamma"});
    return gev_member(parsed.get("gamma", 0.0));
  }
  if (head == "uniform") {
    throw ConfigError("uniform: gamma0 = -1 lies outside the parameter space and is not supported");
  }
  throw ConfigError("unknown distribution '" + head + "'");
}

}  // namespace gevmle
