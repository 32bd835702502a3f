// gevmle command-line front end.
//
// Exit codes: 0 on success (including fits that did not converge), 2 on usage,
// configuration or input errors, 1 on anything unexpected.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gevmle/blocks.hpp"
#include "gevmle/fit.hpp"
#include "gevmle/io.hpp"
#include "gevmle/lab.hpp"
#include "gevmle/reference.hpp"
#include "gevmle/study_io.hpp"
#include "gevmle/svg_plot.hpp"

#ifndef GEVMLE_VERSION
#define GEVMLE_VERSION "unknown"
#endif

namespace {

using namespace gevmle;

constexpr int kExitUsage = 2;

// Usage, configuration or input problems; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g_command_line;

std::vector<std::string> metadata(std::optional<std::uint64_t> seed = std::nullopt) {
  std::vector<std::string> lines{"version=gevmle " GEVMLE_VERSION, "command=" + g_command_line};
  if (seed) lines.push_back("seed=" + std::to_string(*seed));
  return lines;
}

// Writes to `path`, or stdout when the path is empty or "-".
template <class Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  write(out);
  if (!out) throw UsageError("error while writing '" + path + "'");
}

std::vector<double> load_values(const std::string& path) {
  if (path.empty() || path == "-") return read_values(std::cin);
  return read_values_file(path);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string dist;
  std::size_t n = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void cmd_simulate(const SimulateArgs& args) {
  const auto dist = parse_distribution(args.dist);
  const auto seed = resolve_seed(args.seed);
  const auto values = sample_iid(dist, args.n, seed);
  auto header = metadata(seed);
  header.insert(header.begin() + 1, "dist=" + dist.name);
  emit(args.out, [&](std::ostream& os) { write_values(os, values, header); });
}

struct BlocksArgs {
  std::string in;
  std::size_t block_size = 1;
  std::string out;
};

void cmd_blocks(const BlocksArgs& args) {
  const auto data = load_values(args.in);
  const auto series = block_maxima(data, args.block_size);
  auto header = metadata();
  header.push_back("block_size=" + std::to_string(series.block_length));
  header.push_back("source_length=" + std::to_string(series.source_length));
  emit(args.out, [&](std::ostream& os) { write_values(os, series.values, header); });
}

struct FitArgs {
  std::string in;
  std::size_t block_size = 1;
  std::string out;
  double grad_tol = FitOptions{}.grad_tol;
  std::size_t max_iters = FitOptions{}.max_iters;
};

void cmd_fit(const FitArgs& args) {
  const auto data = load_values(args.in);
  if (data.empty()) throw UsageError("input contains no values");
  const auto series = block_maxima(data, args.block_size);
  if (series.size() < 3) {
    throw UsageError("need at least 3 block maxima, got " + std::to_string(series.size()));
  }
  FitOptions options;
  options.grad_tol = args.grad_tol;
  options.max_iters = args.max_iters;
  const auto fit = fit_mle(series.values, options);

  emit(args.out, [&](std::ostream& os) {
    for (const auto& line : metadata()) os << "# " << line << '\n';
    os << "gamma_hat = " << format_double(fit.theta_hat.gamma) << '\n'
       << "mu_hat = " << format_double(fit.theta_hat.mu) << '\n'
       << "sigma_hat = " << format_double(fit.theta_hat.sigma) << '\n'
       << "loglik = " << format_double(fit.loglik) << '\n'
       << "grad_norm = " << format_double(fit.grad_norm) << '\n'
       << "hessian_negdef = " << (fit.hessian_negdef ? "true" : "false") << '\n'
       << "hessian_max_eigenvalue = " << format_double(fit.hessian_max_eigenvalue) << '\n'
       << "converged = " << (fit.converged ? "true" : "false") << '\n'
       << "status = " << to_string(fit.status) << '\n'
       << "iterations = " << fit.iterations << '\n'
       << "n_blocks = " << fit.n_blocks << '\n'
       << "block_size = " << series.block_length << '\n';
  });
}

struct GofArgs {
  std::string in;
  double gamma = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
};

void cmd_gof(const GofArgs& args) {
  if (!(args.sigma > 0.0)) throw UsageError("--sigma must be positive");
  const auto data = load_values(args.in);
  if (data.empty()) throw UsageError("input contains no values");
  std::vector<double> z;
  z.reserve(data.size());
  for (double x : data) z.push_back((x - args.mu) / args.sigma);
  const EmpiricalMeasure measure(std::move(z));
  const double ks = ks_distance(measure, args.gamma);
  for (const auto& line : metadata()) std::cout << "# " << line << '\n';
  std::cout << "n = " << measure.size() << '\n' << "ks = " << format_double(ks) << '\n';
}

struct StudyArgs {
  std::string config;
  std::string out_dir;
  int threads = 0;
};

void cmd_study(const StudyArgs& args) {
  std::ifstream in(args.config);
  if (!in) throw UsageError("cannot open config '" + args.config + "'");
  const auto config = parse_study_config(in);
#ifdef _OPENMP
  if (args.threads > 0) omp_set_num_threads(args.threads);
#endif

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) throw UsageError("cannot create '" + args.out_dir + "': " + ec.message());
  const fs::path dir(args.out_dir);

  const auto dist = parse_distribution(config.distribution);
  const auto meta = metadata(config.seed);
  const auto report = run_consistency_study(dist, config.n_grid, config.growth, config.replications, config.seed);
  emit((dir / "study.csv").string(), [&](std::ostream& os) { write_study_csv(os, report, meta); });
  emit((dir / "summary.txt").string(), [&](std::ostream& os) { write_study_summary(os, report, meta); });

  if (config.crucial_lemma) {
    const auto table = check_crucial_lemma(dist, config.n_grid, config.growth, config.replications,
                                           derive_seed(config.seed, {101}));
    emit((dir / "crucial_lemma.csv").string(), [&](std::ostream& os) { write_crucial_lemma_csv(os, table, meta); });
  }
  if (config.obstruction) {
    const auto table = check_slow_growth_obstruction(dist, config.n_grid, config.slow_growth, config.growth,
                                                     config.replications, derive_seed(config.seed, {102}));
    emit((dir / "obstruction.csv").string(), [&](std::ostream& os) { write_obstruction_csv(os, table, meta); });
  }
  std::cout << "wrote " << (dir / "study.csv").string() << " (" << report.rows.size() << " rows)\n";
}

struct PlotArgs {
  std::string in;
  std::string out;
};

void cmd_plot(const PlotArgs& args) {
  std::ifstream in(args.in);
  if (!in) throw UsageError("cannot open '" + args.in + "'");
  const auto csv = read_study_csv(in);
  const auto svg = render_study_svg(csv);
  emit(args.out, [&](std::ostream& os) { os << svg; });
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) {
    if (i > 0) g_command_line += ' ';
    g_command_line += i == 0 ? std::string("gevmle") : std::string(argv[i]);
  }

  CLI::App app{"Block-maxima maximum likelihood for the extreme value index"};
  app.set_version_flag("--version", "gevmle " GEVMLE_VERSION);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw i.i.d. values from a reference distribution");
  simulate->add_option("--dist", sim.dist, "Distribution, e.g. pareto:alpha=1, beta-tail:beta=2, gev:gamma=0.5")
      ->required();
  simulate->add_option("--n", sim.n, "Number of draws")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Seed (a random one is drawn and recorded when omitted)");
  simulate->add_option("--out", sim.out, "Output file (stdout by default)");

  BlocksArgs blk;
  auto* blocks = app.add_subcommand("blocks", "Extract block maxima");
  blocks->add_option("--in", blk.in, "Input file, one value per line")->required();
  blocks->add_option("--block-size,-m", blk.block_size, "Block length m")->required()->check(CLI::PositiveNumber);
  blocks->add_option("--out", blk.out, "Output file (stdout by default)");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit the GEV to block maxima by maximum likelihood");
  fit->add_option("--in", fa.in, "Input file, one value per line")->required();
  fit->add_option("--block-size,-m", fa.block_size, "Block length m (1 fits the values directly)")
      ->check(CLI::PositiveNumber);
  fit->add_option("--out", fa.out, "Result file (stdout by default)");
  fit->add_option("--grad-tol", fa.grad_tol, "Gradient-norm tolerance")->check(CLI::PositiveNumber);
  fit->add_option("--max-iters", fa.max_iters, "Iteration budget")->check(CLI::PositiveNumber);

  GofArgs ga;
  auto* gof = app.add_subcommand("gof", "Kolmogorov-Smirnov distance to a GEV law");
  gof->add_option("--in", ga.in, "Input file, one value per line")->required();
  gof->add_option("--gamma", ga.gamma, "Shape")->required();
  gof->add_option("--mu", ga.mu, "Location");
  gof->add_option("--sigma", ga.sigma, "Scale");

  StudyArgs sa;
  auto* study = app.add_subcommand("study", "Run a Monte Carlo consistency study");
  study->add_option("--config", sa.config, "Study configuration file")->required();
  study->add_option("--out-dir", sa.out_dir, "Directory for the CSV report and summary")->required();
  study->add_option("--threads", sa.threads, "OpenMP threads (default: runtime setting)");

  PlotArgs pa;
  auto* plot = app.add_subcommand("plot", "Render a study CSV as SVG box summaries");
  plot->add_option("--in", pa.in, "Study CSV")->required();
  plot->add_option("--out", pa.out, "SVG file (stdout by default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate) cmd_simulate(sim);
    if (*blocks) cmd_blocks(blk);
    if (*fit) cmd_fit(fa);
    if (*gof) cmd_gof(ga);
    if (*study) cmd_study(sa);
    if (*plot) cmd_plot(pa);
  } catch (const UsageError& e) {
    std::cerr << "gevmle: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "gevmle: invalid configuration:\n" << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "gevmle: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EmptySeriesError& e) {
    std::cerr << "gevmle: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateDataError& e) {
    std::cerr << "gevmle: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "gevmle: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "gevmle: internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
