// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: gevmle_acceptance [output-dir]
//
// Every randomized criterion writes its raw results below <output-dir>/run1.
// The whole suite is then repeated into run2 and the files compared byte for byte.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gevmle/blocks.hpp"
#include "gevmle/fit.hpp"
#include "gevmle/gev.hpp"
#include "gevmle/lab.hpp"
#include "gevmle/reference.hpp"
#include "gevmle/rng.hpp"
#include "gevmle/study_io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace gevmle;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::function<Outcome(const fs::path&)> run;
};

const std::vector<std::size_t> kGrid{100, 400, 1600};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream s;
  s << std::setprecision(4);
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
  return s.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Fits collected by criteria 3 and 4, checked by criterion 8.
struct FitLedger {
  std::size_t fits = 0;
  std::size_t violations = 0;
};
FitLedger g_fits;

Outcome modes(const fs::path&) {
  double worst = 0.0;
  for (double g : {-0.5, -0.25, 0.0, 0.5, 1.0, 2.0}) {
    const auto [x, v] = oracle::golden_max([g](double t) { return gev_loglik(g, t); }, g);
    worst = std::max({worst, std::abs(x - gev_mode(g)), std::abs(v - gev_loglik_max(g))});
  }
  return {worst <= 1e-8, "max error " + fmt(worst)};
}

Outcome gradients(const fs::path& dir) {
  std::mt19937_64 rng(20240602);
  std::uniform_real_distribution<double> ug(-0.9, 2.0), um(-3, 3), ulogs(-1, 1), uu(0.01, 0.99);
  double worst = 0.0;
  std::ostringstream log;
  for (int i = 0; i < 100; ++i) {
    const GevParams th{ug(rng), um(rng), std::exp(ulogs(rng))};
    const double x = th.mu + th.sigma * gev_quantile(th.gamma, uu(rng));
    const auto an = gev_loglik_gradient(th, x);
    const auto fd = oracle::fd_gradient([x](const GevParams& p) { return gev_loglik3(p, x); }, th, 1e-6);
    const double e = oracle::relative_error(an, fd);
    worst = std::max(worst, e);
    log << fmt(th.gamma) << ',' << fmt(th.mu) << ',' << fmt(th.sigma) << ',' << fmt(x) << ',' << fmt(e) << '\n';
  }
  write_text(dir / "c2_gradients.csv", log.str());
  return {worst <= 1e-5, "max relative error " + fmt(worst)};
}

Outcome exact_recovery(const fs::path& dir) {
  const std::size_t reps = 100, n = 2000;
  std::vector<FitResult> fits(reps);
  std::vector<std::vector<double>> samples(reps);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < reps; ++r) {
    samples[r] = gev_sample({0.5, 0.0, 1.0}, n, derive_seed(303, {r}));
    fits[r] = fit_mle(samples[r]);
  }
  std::size_t within = 0;
  std::ostringstream log;
  log << "rep,gamma_hat,mu_hat,sigma_hat,status\n";
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& f = fits[r];
    if (std::abs(f.theta_hat.gamma - 0.5) <= 0.1) ++within;
    ++g_fits.fits;
    if (!(f.theta_hat.gamma > -1.0) || !strictly_feasible(f.theta_hat, samples[r])) ++g_fits.violations;
    log << r << ',' << fmt(f.theta_hat.gamma) << ',' << fmt(f.theta_hat.mu) << ',' << fmt(f.theta_hat.sigma) << ','
        << to_string(f.status) << '\n';
  }
  write_text(dir / "c3_recovery.csv", log.str());
  return {within >= 90, std::to_string(within) + "/100 within 0.1"};
}

std::vector<ReferenceDistribution> trend_members() {
  return {pareto(1.0), pareto(2.0), exponential(), beta_tail(2.0)};
}

Outcome consistency_trend(const fs::path& dir) {
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 404;
  for (const auto& dist : trend_members()) {
    const auto report = run_consistency_study(dist, kGrid, GrowthRule::poly_log(), 200, seed++);
    std::ofstream out(dir / ("c4_" + dist.name + ".csv"), std::ios::binary);
    write_study_csv(out, report, {"seed=" + std::to_string(seed - 1)});
    std::vector<double> g, m, s;
    for (const auto& row : report.summary) {
      g.push_back(row.gamma_abs_err.median);
      m.push_back(row.mu_abs_err.median);
      s.push_back(row.sigma_abs_err.median);
    }
    const bool ok = strictly_decreasing(g) && strictly_decreasing(m) && strictly_decreasing(s);
    pass = pass && ok;
    g_fits.fits += report.rows.size();
    g_fits.violations += report.feasibility_violations();
    detail += "\n    " + dist.name + (ok ? " ok" : " NOT decreasing") + ": gamma " + join(g) + "; mu " + join(m) +
              "; sigma " + join(s);
  }
  return {pass, detail};
}

Outcome ks_trend(const fs::path& dir) {
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 505;
  std::ostringstream log;
  for (const auto& dist : trend_members()) {
    const auto rows = normalized_maxima_study(dist, kGrid, GrowthRule::poly_log(), 50, seed++);
    const auto med = median_by_n(rows, kGrid, &NormalizedMaximaRow::ks);
    for (const auto& r : rows) log << dist.name << ',' << r.n << ',' << r.rep << ',' << fmt(r.ks) << '\n';
    const bool ok = strictly_decreasing(med);
    pass = pass && ok;
    detail += "\n    " + dist.name + (ok ? " ok: " : " NOT decreasing: ") + join(med);
  }
  write_text(dir / "c5_ks.csv", log.str());
  return {pass, detail};
}

Outcome loglik_trend(const fs::path& dir) {
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 606;
  std::ostringstream log;
  for (const auto& dist : trend_members()) {
    const auto t = check_crucial_lemma(dist, kGrid, GrowthRule::poly_log(), 50, seed++);
    std::vector<double> med;
    for (const auto& r : t.rows) {
      med.push_back(r.median_gap);
      log << dist.name << ',' << r.n << ',' << r.m << ',' << fmt(r.median_gap) << ',' << r.neg_inf_count << '\n';
    }
    const bool ok = strictly_decreasing(med);
    pass = pass && ok;
    detail += "\n    " + dist.name + (ok ? " ok: " : " NOT decreasing: ") + join(med);
  }
  for (double g : {-0.5, 0.0, 0.5, 1.0}) {
    const auto z = gev_sample({g, 0.0, 1.0}, 10000000, derive_seed(607, {static_cast<std::uint64_t>(4 * (g + 1))}));
    double s = 0.0, s2 = 0.0;
    for (double x : z) {
      const double l = gev_loglik(g, x);
      s += l;
      s2 += l * l;
    }
    const double n = static_cast<double>(z.size());
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    const double target = expected_loglik(g);
    const bool ok = std::abs(target - mean) < 3 * se;
    pass = pass && ok;
    log << "mc," << fmt(g) << ',' << fmt(target) << ',' << fmt(mean) << ',' << fmt(se) << '\n';
    std::ostringstream d;
    d << std::setprecision(6) << "\n    target gamma0=" << g << ": quadrature " << target << ", MC " << mean
      << " (" << std::abs(target - mean) / se << " SE)" << (ok ? "" : " MISMATCH");
    detail += d.str();
  }
  write_text(dir / "c6_loglik.csv", log.str());
  return {pass, detail};
}

Outcome obstruction(const fs::path& dir) {
  const std::vector<std::size_t> grid{1000, 10000, 100000};
  const auto t = check_slow_growth_obstruction(cauchy(), grid, GrowthRule::slow(1.0, 1), GrowthRule::poly_log(), 50,
                                               707);
  std::ostringstream log;
  std::vector<double> slow, fast;
  for (const auto& r : t.rows) {
    slow.push_back(r.median_min_slow);
    fast.push_back(r.median_min_fast);
    log << r.n << ',' << r.m_slow << ',' << r.m_fast << ',' << fmt(r.median_min_slow) << ','
        << fmt(r.median_min_fast) << '\n';
  }
  write_text(dir / "c7_obstruction.csv", log.str());
  const bool pass = t.slow_strictly_decreasing && t.fast_variation < t.slow_drop;
  std::ostringstream d;
  d << std::setprecision(4) << "slow medians " << join(slow) << "; poly_log medians " << join(fast)
    << "; slow drop " << t.slow_drop << ", poly_log variation " << t.fast_variation;
  return {pass, d.str()};
}

Outcome feasibility(const fs::path&) {
  return {g_fits.fits > 0 && g_fits.violations == 0,
          std::to_string(g_fits.violations) + " violations in " + std::to_string(g_fits.fits) + " fits"};
}

Outcome equivalence(const fs::path&) {
  const auto p = pareto(1.0);
  const std::vector<std::size_t> ms{100000};
  const auto rows = check_norm_equivalence(p, [&](std::size_t m) { return quantile_matched_constants(p, m); }, ms);
  const double r = std::abs(rows[0].ratio - 1), g = std::abs(rows[0].gap);
  return {r < 0.01 && g < 0.01, "|a'/a - 1| = " + fmt(r) + ", |(b'-b)/a| = " + fmt(g)};
}

Outcome kl(const fs::path& dir) {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> ug(-0.5, 1.5), um(-2, 2), ulogs(-0.7, 0.7);
  double worst_self = 0.0, min_pos = kPlusInf;
  std::size_t nonpositive = 0;
  std::ostringstream log;
  for (int i = 0; i < 50; ++i) {
    const GevParams a{ug(rng), um(rng), std::exp(ulogs(rng))};
    const GevParams b{ug(rng), um(rng), std::exp(ulogs(rng))};
    const double self = kl_divergence(a, a), cross = kl_divergence(a, b);
    worst_self = std::max(worst_self, std::abs(self));
    if (!(cross > 0)) ++nonpositive;
    min_pos = std::min(min_pos, cross);
    log << fmt(a.gamma) << ',' << fmt(a.mu) << ',' << fmt(a.sigma) << ',' << fmt(b.gamma) << ',' << fmt(b.mu) << ','
        << fmt(b.sigma) << ',' << fmt(self) << ',' << fmt(cross) << '\n';
  }
  write_text(dir / "c10_kl.csv", log.str());
  return {worst_self <= 1e-8 && nonpositive == 0,
          "max |kl(t,t)| " + fmt(worst_self) + ", min kl over pairs " + fmt(min_pos)};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{{1, modes},           {2, gradients},    {3, exact_recovery},
                                          {4, consistency_trend}, {5, ks_trend},   {6, loglik_trend},
                                          {7, obstruction},     {8, feasibility},  {9, equivalence},
                                          {10, kl}};
  return all;
}

std::vector<Outcome> run_all(const fs::path& dir, bool report) {
  fs::create_directories(dir);
  g_fits = {};
  std::vector<Outcome> out;
  for (const auto& c : criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    out.push_back(c.run(dir));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report) {
      std::printf("criterion %2d: %s  (%.1f s) %s\n", c.id, out.back().pass ? "PASS" : "FAIL", secs,
                  out.back().detail.c_str());
      std::fflush(stdout);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1])
                                 : fs::temp_directory_path() / ("gevmle_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root / "run1");
  fs::remove_all(root / "run2");
  const auto first = run_all(root / "run1", true);
  (void)run_all(root / "run2", false);

  std::size_t files = 0, differing = 0;
  std::string which;
  for (const auto& e : fs::directory_iterator(root / "run1")) {
    ++files;
    const auto other = root / "run2" / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
      ++differing;
      which += " " + e.path().filename().string();
    }
  }
  const bool det = files > 0 && differing == 0;
  std::printf("criterion 11: %s  %zu files compared, %zu differ%s\n", det ? "PASS" : "FAIL", files, differing,
              which.c_str());

  bool all = det;
  for (const auto& o : first) all = all && o.pass;
  std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
