#include "gevmle/lab.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "gevmle/blocks.hpp"
#include "gevmle/fit.hpp"
#include "gevmle/gev.hpp"
#include "gevmle/io.hpp"
#include "gevmle/quadrature.hpp"

namespace gevmle {

namespace {

constexpr std::uint64_t kNormalizedMaximaStream = 0x4e4d;  // separate from the fit study streams

// Runs body(i) for i in [0, count). Iterations write to disjoint slots, so the
// outcome does not depend on the schedule.
template <class Body>
void for_each_index(std::size_t count, Execution exec, Body&& body) {
  std::exception_ptr failure;
  const auto total = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (std::ptrdiff_t i = 0; i < total; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(gevmle_lab_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

double log_positive(double x) { return x > 0.0 ? std::log(x) : kMinusInf; }

}  // namespace

// ---------------------------------------------------------------------------
// Growth rules

std::size_t GrowthRule::operator()(std::size_t n) const {
  const double nn = static_cast<double>(n);
  double m = 1.0;
  switch (kind) {
    case Kind::poly_log: {
      const double l = log_positive(nn);
      m = l > 0.0 ? std::ceil(c * std::pow(l, exponent)) : 1.0;
      break;
    }
    case Kind::power: m = std::ceil(c * std::pow(nn, exponent)); break;
    case Kind::fixed: m = static_cast<double>(fixed_m); break;
    case Kind::slow: {
      const double ll = log_positive(log_positive(nn));
      m = (std::isfinite(ll) ? std::ceil(c * ll) : 0.0) + static_cast<double>(offset);
      break;
    }
  }
  return m < 1.0 || !std::isfinite(m) ? 1 : static_cast<std::size_t>(m);
}

bool GrowthRule::satisfies_growth_condition() const noexcept {
  switch (kind) {
    case Kind::poly_log: return exponent > 1.0 && c > 0.0;
    case Kind::power: return exponent > 0.0 && c > 0.0;
    case Kind::fixed:
    case Kind::slow: return false;
  }
  return false;
}

std::string GrowthRule::to_string() const {
  switch (kind) {
    case Kind::poly_log: return "poly_log:c=" + format_double(c) + ",a=" + format_double(exponent);
    case Kind::power: return "power:alpha=" + format_double(exponent) + ",c=" + format_double(c);
    case Kind::fixed: return "fixed:m=" + std::to_string(fixed_m);
    case Kind::slow: return "slow:c=" + format_double(c) + ",offset=" + std::to_string(offset);
  }
  return "?";
}

GrowthRule GrowthRule::poly_log(double c, double a) {
  if (!(c > 0.0) || !(a > 0.0)) throw ConfigError("poly_log growth needs c > 0 and a > 0");
  GrowthRule g;
  g.kind = Kind::poly_log;
  g.c = c;
  g.exponent = a;
  return g;
}

GrowthRule GrowthRule::power(double alpha, double c) {
  if (!(c > 0.0) || !(alpha > 0.0)) throw ConfigError("power growth needs c > 0 and alpha > 0");
  GrowthRule g;
  g.kind = Kind::power;
  g.c = c;
  g.exponent = alpha;
  return g;
}

GrowthRule GrowthRule::fixed(std::size_t m) {
  if (m < 1) throw ConfigError("fixed growth needs m >= 1");
  GrowthRule g;
  g.kind = Kind::fixed;
  g.fixed_m = m;
  return g;
}

GrowthRule GrowthRule::slow(double c, std::size_t offset) {
  if (!(c > 0.0)) throw ConfigError("slow growth needs c > 0");
  GrowthRule g;
  g.kind = Kind::slow;
  g.c = c;
  g.offset = offset;
  return g;
}

GrowthRule GrowthRule::parse(std::string_view spec) {
  KeyedSpec parsed;
  try {
    parsed = parse_keyed_spec(spec);
  } catch (const ParseError& e) {
    throw ConfigError("bad growth rule '" + std::string(spec) + "': " + e.what());
  }
  auto as_count = [](double v, std::string_view what) {
    if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError(std::string(what) + " must be a nonnegative integer");
    return static_cast<std::size_t>(v);
  };
  auto only = [&](std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : parsed.params) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        throw ConfigError("growth rule '" + parsed.head + "' has no parameter '" + k + "'");
      }
    }
  };
  if (parsed.head == "poly_log") {
    only({"c", "a"});
    return poly_log(parsed.get("c", 1.0), parsed.get("a", 2.0));
  }
  if (parsed.head == "power") {
    only({"c", "alpha"});
    return power(parsed.get("alpha", 0.5), parsed.get("c", 1.0));
  }
  if (parsed.head == "fixed") {
    only({"m"});
    return fixed(as_count(parsed.get("m", 1.0), "m"));
  }
  if (parsed.head == "slow") {
    only({"c", "offset"});
    return slow(parsed.get("c", 1.0), as_count(parsed.get("offset", 1.0), "offset"));
  }
  throw ConfigError("unknown growth rule '" + parsed.head + "'");
}

// ---------------------------------------------------------------------------
// Summaries

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("quartiles: no values");
  if (std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); })) {
    throw std::invalid_argument("quartiles: NaN value");
  }
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (frac == 0.0 || i + 1 >= values.size()) return values[i];
    if (values[i] == values[i + 1]) return values[i];
    return values[i] + frac * (values[i + 1] - values[i]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

double median(std::vector<double> values) { return quartiles(std::move(values)).median; }

std::size_t StudyReport::feasibility_violations() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const StudyRow& r) { return !r.feasible; }));
}

// ---------------------------------------------------------------------------
// Consistency study

double expected_loglik(double gamma0) {
  if (!(gamma0 > -1.0)) throw std::domain_error("expected_loglik: requires gamma0 > -1");
  const auto support = gev_support(gamma0);
  auto integrand = [gamma0](double x) {
    const double l = gev_loglik(gamma0, x);
    return std::isfinite(l) ? l * std::exp(l) : 0.0;
  };
  return integrate(integrand, support.lower, support.upper, 1e-12).value;
}

StudyReport run_consistency_study(const ReferenceDistribution& dist, std::span<const std::size_t> n_grid,
                                  const GrowthRule& growth, std::size_t replications, std::uint64_t seed,
                                  Execution exec) {
  if (!(dist.gamma0 > -1.0)) throw ConfigError(dist.name + ": consistency studies require gamma0 > -1");
  if (replications < 1) throw ConfigError("replications must be >= 1");

  StudyReport report;
  report.distribution = dist.name;
  report.gamma0 = dist.gamma0;
  report.growth = growth;
  report.seed = seed;
  report.replications = replications;

  std::vector<NormalizingConstants> constants;
  for (auto n : n_grid) {
    if (n < 3) throw ConfigError("every n in the grid must be >= 3");
    constants.push_back(norm_constants(dist, growth(n)));
  }

  report.rows.resize(n_grid.size() * replications);
  const GevParams truth{dist.gamma0, 0.0, 1.0};
  for_each_index(report.rows.size(), exec, [&](std::size_t index) {
    const std::size_t cell = index / replications;
    const std::size_t rep = index % replications;
    const std::size_t n = n_grid[cell];
    const auto& nc = constants[cell];

    const auto series = simulate_block_maxima(dist, n, nc.m, derive_seed(seed, {cell, rep}));
    StudyRow row;
    row.n = n;
    row.m = nc.m;
    row.rep = rep;

    const auto normalized = normalize(series, nc);
    const EmpiricalMeasure measure(normalized.values);
    row.ks = ks_distance(measure, dist.gamma0);
    row.mean_ll_truth = empirical_mean_loglik(measure, truth);

    try {
      const auto fit = fit_mle(series.values);
      row.gamma_hat = fit.theta_hat.gamma;
      row.mu_err = (fit.theta_hat.mu - nc.b) / nc.a;
      row.sigma_ratio = fit.theta_hat.sigma / nc.a;
      row.converged = fit.converged;
      row.feasible = fit.theta_hat.gamma > -1.0 && strictly_feasible(fit.theta_hat, series.values);
    } catch (const DegenerateDataError&) {
      row.gamma_hat = row.mu_err = row.sigma_ratio = std::numeric_limits<double>::quiet_NaN();
      row.converged = false;
      row.feasible = true;  // nothing was reported
    }
    report.rows[index] = row;
  });

  const double target = expected_loglik(dist.gamma0);
  for (std::size_t cell = 0; cell < n_grid.size(); ++cell) {
    StudySummaryRow s;
    s.n = n_grid[cell];
    s.m = constants[cell].m;
    s.replications = replications;
    std::vector<double> g, mu, sg, ks, gap;
    for (std::size_t rep = 0; rep < replications; ++rep) {
      const auto& r = report.rows[cell * replications + rep];
      s.converged += r.converged ? 1 : 0;
      ks.push_back(r.ks);
      gap.push_back(std::abs(r.mean_ll_truth - target));
      if (std::isnan(r.gamma_hat)) continue;
      g.push_back(std::abs(r.gamma_hat - dist.gamma0));
      mu.push_back(std::abs(r.mu_err));
      sg.push_back(std::abs(r.sigma_ratio - 1.0));
    }
    if (!g.empty()) {
      s.gamma_abs_err = quartiles(g);
      s.mu_abs_err = quartiles(mu);
      s.sigma_abs_err = quartiles(sg);
    }
    s.ks = quartiles(ks);
    s.ll_gap = quartiles(gap);
    report.summary.push_back(s);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Fit-free checks

std::vector<NormalizedMaximaRow> normalized_maxima_study(const ReferenceDistribution& dist,
                                                         std::span<const std::size_t> n_grid,
                                                         const GrowthRule& growth, std::size_t replications,
                                                         std::uint64_t seed, Execution exec) {
  if (replications < 1) throw ConfigError("replications must be >= 1");
  std::vector<NormalizingConstants> constants;
  for (auto n : n_grid) {
    if (n < 1) throw ConfigError("every n in the grid must be >= 1");
    constants.push_back(norm_constants(dist, growth(n)));
  }

  std::vector<NormalizedMaximaRow> rows(n_grid.size() * replications);
  const GevParams truth{dist.gamma0, 0.0, 1.0};
  for_each_index(rows.size(), exec, [&](std::size_t index) {
    const std::size_t cell = index / replications;
    const std::size_t rep = index % replications;
    const auto& nc = constants[cell];
    const auto series =
        simulate_block_maxima(dist, n_grid[cell], nc.m, derive_seed(seed, {kNormalizedMaximaStream, cell, rep}));
    const auto normalized = normalize(series, nc);
    const EmpiricalMeasure measure(normalized.values);

    NormalizedMaximaRow row;
    row.n = n_grid[cell];
    row.m = nc.m;
    row.rep = rep;
    row.ks = ks_distance(measure, dist.gamma0);
    row.mean_ll_truth = empirical_mean_loglik(measure, truth);
    row.min_normalized = measure.points().front();
    rows[index] = row;
  });
  return rows;
}

std::vector<double> median_by_n(const std::vector<NormalizedMaximaRow>& rows, std::span<const std::size_t> n_grid,
                                double NormalizedMaximaRow::*column) {
  std::vector<double> out;
  for (auto n : n_grid) {
    std::vector<double> v;
    for (const auto& r : rows)
      if (r.n == n) v.push_back(r.*column);
    out.push_back(v.empty() ? std::numeric_limits<double>::quiet_NaN() : median(std::move(v)));
  }
  return out;
}

CrucialLemmaTable check_crucial_lemma(const ReferenceDistribution& dist, std::span<const std::size_t> n_grid,
                                      const GrowthRule& growth, std::size_t replications, std::uint64_t seed,
                                      Execution exec) {
  if (!(dist.gamma0 > -1.0)) throw ConfigError(dist.name + ": requires gamma0 > -1");
  CrucialLemmaTable table;
  table.target = expected_loglik(dist.gamma0);
  table.growth_condition_met = growth.satisfies_growth_condition();

  const auto rows = normalized_maxima_study(dist, n_grid, growth, replications, seed, exec);
  for (auto n : n_grid) {
    CrucialLemmaRow out;
    out.n = n;
    out.m = growth(n);
    std::vector<double> gaps;
    for (const auto& r : rows) {
      if (r.n != n) continue;
      ++out.replications;
      if (r.mean_ll_truth == kMinusInf) {
        ++out.neg_inf_count;
        gaps.push_back(kPlusInf);
      } else {
        gaps.push_back(std::abs(r.mean_ll_truth - table.target));
      }
    }
    out.median_gap = median(std::move(gaps));
    table.rows.push_back(out);
  }
  return table;
}

ObstructionTable check_slow_growth_obstruction(const ReferenceDistribution& dist,
                                               std::span<const std::size_t> n_grid, const GrowthRule& slow,
                                               const GrowthRule& fast, std::size_t replications,
                                               std::uint64_t seed, Execution exec) {
  if (!(dist.gamma0 > 0.0) || std::isfinite(dist.left_endpoint)) {
    throw ConfigError(dist.name + ": the slow-growth obstruction needs gamma0 > 0 and a left endpoint of -inf");
  }
  if (n_grid.empty()) throw ConfigError("empty n grid");
  const auto slow_rows = normalized_maxima_study(dist, n_grid, slow, replications, derive_seed(seed, {1}), exec);
  const auto fast_rows = normalized_maxima_study(dist, n_grid, fast, replications, derive_seed(seed, {2}), exec);
  const auto slow_med = median_by_n(slow_rows, n_grid, &NormalizedMaximaRow::min_normalized);
  const auto fast_med = median_by_n(fast_rows, n_grid, &NormalizedMaximaRow::min_normalized);

  ObstructionTable table;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    table.rows.push_back({n_grid[i], slow(n_grid[i]), fast(n_grid[i]), slow_med[i], fast_med[i]});
  }
  table.slow_strictly_decreasing = true;
  for (std::size_t i = 1; i < slow_med.size(); ++i) {
    table.slow_strictly_decreasing = table.slow_strictly_decreasing && slow_med[i] < slow_med[i - 1];
  }
  table.slow_drop = slow_med.front() - slow_med.back();
  const auto [lo, hi] = std::minmax_element(fast_med.begin(), fast_med.end());
  table.fast_variation = *hi - *lo;
  return table;
}

std::vector<EquivalenceRow> check_norm_equivalence(const ReferenceDistribution& dist,
                                                   const ConstantsRule& alt_constants,
                                                   std::span<const std::size_t> m_grid) {
  std::vector<EquivalenceRow> rows;
  for (auto m : m_grid) {
    const auto exact = norm_constants(dist, m);
    const auto alt = alt_constants(m);
    rows.push_back({m, alt.a / exact.a, (alt.b - exact.b) / exact.a});
  }
  return rows;
}

NormalizingConstants quantile_matched_constants(const ReferenceDistribution& dist, std::size_t m) {
  if (m < 1) throw std::invalid_argument("quantile_matched_constants: m must be >= 1");
  const double mm = static_cast<double>(m);
  // F^m quantile at p equals U(1 / (1 - p^{1/m})).
  auto block_quantile = [&](double log_p) { return dist.tail_quantile(1.0 / -std::expm1(log_p / mm)); };
  const double b = block_quantile(-1.0);
  const double x_half = gev_quantile(dist.gamma0, std::exp(-0.5));
  const double a = (block_quantile(-0.5) - b) / x_half;
  return {a, b, m};
}

}  // namespace gevmle
