#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "gevmle/lab.hpp"

namespace gevmle {

/// Upper bound on n * m(n) raw draws per replication accepted from a study config.
inline constexpr std::size_t kStudyCellBudget = 10'000'000;

inline constexpr const char* kStudyCsvHeader = "n,m,rep,gamma_hat,mu_err,sigma_ratio,converged,ks,mean_ll_truth";

/// Study configuration file, `key = value` per line:
///
///   distribution  = pareto:alpha=1          (required)
///   n_grid        = 100, 400, 1600          (required)
///   growth        = poly_log:c=1,a=2        (default)
///   replications  = 200                     (required)
///   seed          = 20240601                (required)
///   crucial_lemma = false                   (also write crucial_lemma.csv)
///   obstruction   = false                   (also write obstruction.csv)
///   slow_growth   = slow:c=1,offset=1       (rule compared against `growth`)
struct StudyConfig {
  std::string distribution;
  std::vector<std::size_t> n_grid;
  GrowthRule growth = GrowthRule::poly_log();
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  bool crucial_lemma = false;
  bool obstruction = false;
  GrowthRule slow_growth = GrowthRule::slow();
};

/// Parses and validates. Throws ConfigError whose message lists every violation, one per line.
[[nodiscard]] StudyConfig parse_study_config(std::istream& in);

/// Empty when the config is usable.
[[nodiscard]] std::vector<std::string> validate_study_config(const StudyConfig& config);

/// Metadata lines (without the leading "# ") followed by the header and one row per replication.
void write_study_csv(std::ostream& out, const StudyReport& report, const std::vector<std::string>& metadata);
void write_study_summary(std::ostream& out, const StudyReport& report, const std::vector<std::string>& metadata);
void write_crucial_lemma_csv(std::ostream& out, const CrucialLemmaTable& table,
                             const std::vector<std::string>& metadata);
void write_obstruction_csv(std::ostream& out, const ObstructionTable& table,
                           const std::vector<std::string>& metadata);

/// A study CSV read back: `key=value` metadata comments plus the rows.
struct StudyCsv {
  std::map<std::string, std::string> metadata;
  std::vector<StudyRow> rows;
};

/// Throws ParseError when the header or any row does not match the schema.
[[nodiscard]] StudyCsv read_study_csv(std::istream& in);

}  // namespace gevmle
