#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gevmle/kernels.hpp"
#include "gevmle/reference.hpp"

namespace gevmle {

/// Block length as a function of the number of blocks, m = m(n). Always >= 1.
///
///   poly_log  m = ceil(c (log n)^a)            (growth condition holds for a > 1)
///   power     m = ceil(c n^alpha)              (holds for alpha > 0)
///   fixed     m = const                        (violates it)
///   slow      m = ceil(c log log n) + offset   (violates it)
struct GrowthRule {
  enum class Kind { poly_log, power, fixed, slow };

  Kind kind = Kind::poly_log;
  double c = 1.0;
  double exponent = 2.0;  // a for poly_log, alpha for power
  std::size_t fixed_m = 1;
  std::size_t offset = 0;

  [[nodiscard]] std::size_t operator()(std::size_t n) const;
  /// Whether m(n) / log n -> infinity.
  [[nodiscard]] bool satisfies_growth_condition() const noexcept;
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] static GrowthRule poly_log(double c = 1.0, double a = 2.0);
  [[nodiscard]] static GrowthRule power(double alpha, double c = 1.0);
  [[nodiscard]] static GrowthRule fixed(std::size_t m);
  [[nodiscard]] static GrowthRule slow(double c = 1.0, std::size_t offset = 1);
  /// `poly_log:c=1,a=2`, `power:alpha=0.5`, `fixed:m=20`, `slow:c=1,offset=1`.
  [[nodiscard]] static GrowthRule parse(std::string_view spec);
};

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

/// Sample quartiles with linear interpolation between order statistics.
/// Infinite values sort to the ends; NaN is rejected.
[[nodiscard]] Quartiles quartiles(std::vector<double> values);
[[nodiscard]] double median(std::vector<double> values);

struct StudyRow {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t rep = 0;
  double gamma_hat = 0.0;
  double mu_err = 0.0;       // (mu_hat - b_m) / a_m
  double sigma_ratio = 0.0;  // sigma_hat / a_m
  bool converged = false;
  double ks = 0.0;             // KS distance of normalized maxima to F_gamma0
  double mean_ll_truth = 0.0;  // P_n[l_gamma0] on normalized maxima
  bool feasible = false;       // theta_hat strictly feasible and gamma_hat > -1
};

struct StudySummaryRow {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t replications = 0;
  std::size_t converged = 0;
  Quartiles gamma_abs_err;  // |gamma_hat - gamma0|
  Quartiles mu_abs_err;     // |(mu_hat - b_m) / a_m|
  Quartiles sigma_abs_err;  // |sigma_hat / a_m - 1|
  Quartiles ks;
  Quartiles ll_gap;         // |P_n[l_gamma0] - G_gamma0[l_gamma0]|
};

struct StudyReport {
  std::string distribution;
  double gamma0 = 0.0;
  GrowthRule growth;
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  std::vector<StudyRow> rows;  // ordered by (n-grid position, rep)
  std::vector<StudySummaryRow> summary;

  [[nodiscard]] std::size_t feasibility_violations() const noexcept;
};

/// Per n in n_grid: m = growth(n), simulate n blocks of m i.i.d. draws, fit the
/// GEV by maximum likelihood and record the normalized estimation errors.
/// Replication (i, r) uses the stream derive_seed(seed, {i, r}), so the report
/// is identical for serial and parallel execution.
[[nodiscard]] StudyReport run_consistency_study(const ReferenceDistribution& dist,
                                                std::span<const std::size_t> n_grid, const GrowthRule& growth,
                                                std::size_t replications, std::uint64_t seed,
                                                Execution exec = Execution::parallel);

/// G_gamma0[l_gamma0] by quadrature of l * exp(l) over the support.
[[nodiscard]] double expected_loglik(double gamma0);

/// Fit-free statistics of the normalized maxima for one replication.
struct NormalizedMaximaRow {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t rep = 0;
  double ks = 0.0;
  double mean_ll_truth = 0.0;  // -inf when a normalized maximum leaves the support of G_gamma0
  double min_normalized = 0.0;
};

[[nodiscard]] std::vector<NormalizedMaximaRow> normalized_maxima_study(
    const ReferenceDistribution& dist, std::span<const std::size_t> n_grid, const GrowthRule& growth,
    std::size_t replications, std::uint64_t seed, Execution exec = Execution::parallel);

/// Median over replications of a column of normalized_maxima_study, per n.
[[nodiscard]] std::vector<double> median_by_n(const std::vector<NormalizedMaximaRow>& rows,
                                              std::span<const std::size_t> n_grid,
                                              double NormalizedMaximaRow::*column);

struct CrucialLemmaRow {
  std::size_t n = 0;
  std::size_t m = 0;
  double median_gap = 0.0;  // median |P_n[l_gamma0] - G_gamma0[l_gamma0]|; +inf counts as a gap
  std::size_t neg_inf_count = 0;
  std::size_t replications = 0;
};

struct CrucialLemmaTable {
  double target = 0.0;  // G_gamma0[l_gamma0]
  bool growth_condition_met = false;
  std::vector<CrucialLemmaRow> rows;
};

[[nodiscard]] CrucialLemmaTable check_crucial_lemma(const ReferenceDistribution& dist,
                                                    std::span<const std::size_t> n_grid, const GrowthRule& growth,
                                                    std::size_t replications, std::uint64_t seed,
                                                    Execution exec = Execution::parallel);

struct ObstructionRow {
  std::size_t n = 0;
  std::size_t m_slow = 0;
  std::size_t m_fast = 0;
  double median_min_slow = 0.0;  // median of min_k (M_k - b_m) / a_m
  double median_min_fast = 0.0;
};

struct ObstructionTable {
  std::vector<ObstructionRow> rows;
  bool slow_strictly_decreasing = false;
  double slow_drop = 0.0;       // first minus last slow median
  double fast_variation = 0.0;  // max minus min fast median
  [[nodiscard]] bool fast_stable() const noexcept { return fast_variation < slow_drop; }
};

/// Requires gamma0 > 0 and a left endpoint of -inf; throws ConfigError otherwise.
[[nodiscard]] ObstructionTable check_slow_growth_obstruction(const ReferenceDistribution& dist,
                                                             std::span<const std::size_t> n_grid,
                                                             const GrowthRule& slow, const GrowthRule& fast,
                                                             std::size_t replications, std::uint64_t seed,
                                                             Execution exec = Execution::parallel);

struct EquivalenceRow {
  std::size_t m = 0;
  double ratio = 0.0;  // a'_m / a_m
  double gap = 0.0;    // (b'_m - b_m) / a_m
};

using ConstantsRule = std::function<NormalizingConstants(std::size_t)>;

[[nodiscard]] std::vector<EquivalenceRow> check_norm_equivalence(const ReferenceDistribution& dist,
                                                                 const ConstantsRule& alt_constants,
                                                                 std::span<const std::size_t> m_grid);

/// Alternative constants read off the exact law F^m of a block maximum:
/// b'_m is its e^{-1} quantile and a'_m rescales its e^{-1/2} quantile to the
/// matching G_gamma0 quantile.
[[nodiscard]] NormalizingConstants quantile_matched_constants(const ReferenceDistribution& dist, std::size_t m);

}  // namespace gevmle
