#include "gevmle/study_io.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "gevmle/io.hpp"
#include "gevmle/reference.hpp"

namespace gevmle {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

void write_metadata(std::ostream& out, const std::vector<std::string>& metadata) {
  for (const auto& line : metadata) out << "# " << line << '\n';
}

std::string fmt_quartiles(const Quartiles& q) {
  return format_double(q.q1) + " / " + format_double(q.median) + " / " + format_double(q.q3);
}

}  // namespace

std::vector<std::string> validate_study_config(const StudyConfig& config) {
  std::vector<std::string> errors;
  std::optional<ReferenceDistribution> dist;
  if (config.distribution.empty()) {
    errors.emplace_back("distribution: missing");
  } else {
    try {
      dist = parse_distribution(config.distribution);
    } catch (const ConfigError& e) {
      errors.emplace_back(std::string("distribution: ") + e.what());
    }
  }
  if (config.n_grid.empty()) errors.emplace_back("n_grid: missing or empty");
  if (config.replications < 1) errors.emplace_back("replications: must be >= 1");

  auto check_budget = [&](const GrowthRule& rule, const char* label) {
    for (auto n : config.n_grid) {
      if (n < 3) {
        errors.push_back("n_grid: n = " + std::to_string(n) + " is below the minimum of 3 blocks");
        continue;
      }
      const std::size_t m = rule(n);
      if (m > kStudyCellBudget / n) {
        errors.push_back(std::string(label) + ": n * m = " + std::to_string(n) + " * " + std::to_string(m) +
                         " exceeds the per-replication budget of " + std::to_string(kStudyCellBudget) + " draws");
      } else if (dist) {
        try {
          (void)norm_constants(*dist, m);
        } catch (const ConfigError& e) {
          errors.push_back(std::string(label) + ": " + e.what());
        }
      }
    }
  };
  check_budget(config.growth, "growth");
  if (config.obstruction) {
    check_budget(config.slow_growth, "slow_growth");
    if (dist && (!(dist->gamma0 > 0.0) || std::isfinite(dist->left_endpoint))) {
      errors.emplace_back("obstruction: needs a distribution with gamma0 > 0 and left endpoint -inf");
    }
  }
  return errors;
}

StudyConfig parse_study_config(std::istream& in) {
  KeyValueList entries;
  try {
    entries = read_key_values(in);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }

  StudyConfig config;
  std::vector<std::string> errors;
  bool have_seed = false;
  for (const auto& [key, value] : entries) {
    try {
      if (key == "distribution") {
        config.distribution = value;
      } else if (key == "n_grid") {
        for (auto tok : split(value, ',')) {
          const auto n = parse_integer(tok);
          if (n < 1) throw ParseError("grid values must be positive");
          config.n_grid.push_back(static_cast<std::size_t>(n));
        }
      } else if (key == "growth") {
        config.growth = GrowthRule::parse(value);
      } else if (key == "slow_growth") {
        config.slow_growth = GrowthRule::parse(value);
      } else if (key == "replications") {
        const auto r = parse_integer(value);
        if (r < 1) throw ParseError("must be >= 1");
        config.replications = static_cast<std::size_t>(r);
      } else if (key == "seed") {
        const auto s = parse_integer(value);
        if (s < 0) throw ParseError("must be nonnegative");
        config.seed = static_cast<std::uint64_t>(s);
        have_seed = true;
      } else if (key == "crucial_lemma") {
        config.crucial_lemma = parse_bool(value);
      } else if (key == "obstruction") {
        config.obstruction = parse_bool(value);
      } else {
        errors.push_back("unknown key '" + key + "'");
      }
    } catch (const std::exception& e) {
      errors.push_back(key + ": " + e.what());
    }
  }
  if (!have_seed) errors.emplace_back("seed: missing");
  for (auto& e : validate_study_config(config)) {
    if (std::find(errors.begin(), errors.end(), e) == errors.end()) errors.push_back(std::move(e));
  }
  if (!errors.empty()) {
    std::string message;
    for (const auto& e : errors) message += e + '\n';
    message.pop_back();
    throw ConfigError(message);
  }
  return config;
}

void write_study_csv(std::ostream& out, const StudyReport& report, const std::vector<std::string>& metadata) {
  write_metadata(out, metadata);
  out << "# distribution=" << report.distribution << '\n'
      << "# gamma0=" << format_double(report.gamma0) << '\n'
      << "# growth=" << report.growth.to_string() << '\n'
      << "# replications=" << report.replications << '\n'
      << "# seed=" << report.seed << '\n';
  out << kStudyCsvHeader << '\n';
  for (const auto& r : report.rows) {
    out << r.n << ',' << r.m << ',' << r.rep << ',' << format_double(r.gamma_hat) << ',' << format_double(r.mu_err)
        << ',' << format_double(r.sigma_ratio) << ',' << (r.converged ? 1 : 0) << ',' << format_double(r.ks) << ','
        << format_double(r.mean_ll_truth) << '\n';
  }
}

void write_study_summary(std::ostream& out, const StudyReport& report, const std::vector<std::string>& metadata) {
  write_metadata(out, metadata);
  out << "distribution: " << report.distribution << '\n'
      << "gamma0: " << format_double(report.gamma0) << '\n'
      << "growth: " << report.growth.to_string() << '\n'
      << "replications: " << report.replications << '\n'
      << "seed: " << report.seed << '\n'
      << "feasibility_violations: " << report.feasibility_violations() << '\n'
      << "target_mean_loglik: " << format_double(expected_loglik(report.gamma0)) << '\n';
  out << "\n# quartiles are q1 / median / q3 over replications\n";
  for (const auto& s : report.summary) {
    out << "[n=" << s.n << "]\n"
        << "m: " << s.m << '\n'
        << "converged: " << s.converged << '/' << s.replications << '\n'
        << "abs_gamma_error: " << fmt_quartiles(s.gamma_abs_err) << '\n'
        << "abs_mu_error: " << fmt_quartiles(s.mu_abs_err) << '\n'
        << "abs_sigma_ratio_error: " << fmt_quartiles(s.sigma_abs_err) << '\n'
        << "ks: " << fmt_quartiles(s.ks) << '\n'
        << "mean_loglik_gap: " << fmt_quartiles(s.ll_gap) << '\n';
  }
  auto decreasing = [&](auto member) {
    for (std::size_t i = 1; i < report.summary.size(); ++i) {
      if (!((report.summary[i].*member).median < (report.summary[i - 1].*member).median)) return false;
    }
    return true;
  };
  out << "\nmedian_abs_gamma_error_decreasing: " << (decreasing(&StudySummaryRow::gamma_abs_err) ? "yes" : "no")
      << '\n'
      << "median_abs_mu_error_decreasing: " << (decreasing(&StudySummaryRow::mu_abs_err) ? "yes" : "no") << '\n'
      << "median_abs_sigma_ratio_error_decreasing: "
      << (decreasing(&StudySummaryRow::sigma_abs_err) ? "yes" : "no") << '\n';
}

void write_crucial_lemma_csv(std::ostream& out, const CrucialLemmaTable& table,
                             const std::vector<std::string>& metadata) {
  write_metadata(out, metadata);
  out << "# target=" << format_double(table.target) << '\n'
      << "# growth_condition_met=" << (table.growth_condition_met ? "true" : "false") << '\n'
      << "n,m,median_gap,neg_inf_count,replications\n";
  for (const auto& r : table.rows) {
    out << r.n << ',' << r.m << ',' << format_double(r.median_gap) << ',' << r.neg_inf_count << ','
        << r.replications << '\n';
  }
}

void write_obstruction_csv(std::ostream& out, const ObstructionTable& table,
                           const std::vector<std::string>& metadata) {
  write_metadata(out, metadata);
  out << "# slow_strictly_decreasing=" << (table.slow_strictly_decreasing ? "true" : "false") << '\n'
      << "# slow_drop=" << format_double(table.slow_drop) << '\n'
      << "# fast_variation=" << format_double(table.fast_variation) << '\n'
      << "n,m_slow,m_fast,median_min_slow,median_min_fast\n";
  for (const auto& r : table.rows) {
    out << r.n << ',' << r.m_slow << ',' << r.m_fast << ',' << format_double(r.median_min_slow) << ','
        << format_double(r.median_min_fast) << '\n';
  }
}

StudyCsv read_study_csv(std::istream& in) {
  StudyCsv csv;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      const auto meta = trim(body.substr(1));
      const auto eq = meta.find('=');
      if (eq != std::string_view::npos) {
        csv.metadata[std::string(trim(meta.substr(0, eq)))] = std::string(trim(meta.substr(eq + 1)));
      }
      continue;
    }
    if (!header_seen) {
      if (body != kStudyCsvHeader) {
        throw ParseError("line " + std::to_string(line_no) + ": expected header '" + kStudyCsvHeader + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split(body, ',');
    if (fields.size() != 9) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 9 fields, got " +
                       std::to_string(fields.size()));
    }
    try {
      StudyRow r;
      r.n = static_cast<std::size_t>(parse_integer(fields[0]));
      r.m = static_cast<std::size_t>(parse_integer(fields[1]));
      r.rep = static_cast<std::size_t>(parse_integer(fields[2]));
      r.gamma_hat = parse_double(fields[3]);
      r.mu_err = parse_double(fields[4]);
      r.sigma_ratio = parse_double(fields[5]);
      r.converged = parse_bool(fields[6]);
      r.ks = parse_double(fields[7]);
      r.mean_ll_truth = parse_double(fields[8]);
      r.feasible = true;
      csv.rows.push_back(r);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header_seen) throw ParseError("missing study CSV header");
  return csv;
}

}  // namespace gevmle
