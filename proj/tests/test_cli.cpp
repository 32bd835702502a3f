#include <catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "gevmle/gev.hpp"
#include "gevmle/io.hpp"

namespace fs = std::filesystem;
using namespace gevmle;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("gevmle_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = "cd '" + scratch().string() + "' && '" GEVMLE_CLI_PATH "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::map<std::string, std::string> record(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

}  // namespace

TEST_CASE("cli: usage") {
  CHECK(run("--help").code == 0);
  CHECK(run("--version").out.find("gevmle") != std::string::npos);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("simulate --n 10").code == 2);
  CHECK(run("simulate --dist exponential --n -3 --seed 1").code == 2);
}

TEST_CASE("cli: simulate") {
  auto r = run("simulate --dist pareto:alpha=1 --n 1000 --seed 7 --out a.txt");
  REQUIRE(r.code == 0);
  const auto values = read_values_file((scratch() / "a.txt").string());
  CHECK(values.size() == 1000);
  for (double v : values) CHECK(v >= 1.0);
  const auto first = read_file(scratch() / "a.txt");
  REQUIRE(run("simulate --dist pareto:alpha=1 --n 1000 --seed 7 --out a.txt").code == 0);
  CHECK(read_file(scratch() / "a.txt") == first);
  CHECK(read_file(scratch() / "a.txt").find("# seed=7\n") != std::string::npos);

  r = run("simulate --dist uniform --n 10 --seed 1");
  CHECK(r.code == 2);
  CHECK(r.err.find("gamma0 = -1") != std::string::npos);
  CHECK(run("simulate --dist weibull --n 10 --seed 1").code == 2);

  // Without --seed a seed is generated and recorded.
  r = run("simulate --dist exponential --n 5");
  CHECK(r.code == 0);
  CHECK(r.out.find("# seed=") != std::string::npos);
}

TEST_CASE("cli: blocks") {
  write_file(scratch() / "six.txt", "1\n3\n2\n5\n4\n0\n");
  auto r = run("blocks --in six.txt --block-size 2");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  CHECK(read_values(in) == std::vector<double>{3, 5, 4});
  CHECK(run("blocks --in six.txt --block-size 7").code == 2);
  CHECK(run("blocks --in missing.txt --block-size 2").code == 2);
  write_file(scratch() / "bad.txt", "1\nfoo\n");
  r = run("blocks --in bad.txt --block-size 1");
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("cli: fit") {
  // Raw exact GEV data, block size 1.
  {
    const auto data = gev_sample({0.5, 10.0, 2.0}, 10000, 123);
    std::ofstream out(scratch() / "gev.txt");
    write_values(out, data);
  }
  auto r = run("fit --in gev.txt --block-size 1");
  REQUIRE(r.code == 0);
  auto kv = record(r.out);
  CHECK(kv.at("converged") == "true");
  CHECK(std::abs(parse_double(kv.at("gamma_hat")) - 0.5) <= 0.05);
  CHECK(std::abs(parse_double(kv.at("mu_hat")) - 10.0) <= 0.1);
  CHECK(std::abs(parse_double(kv.at("sigma_hat")) - 2.0) <= 0.1);
  CHECK(kv.at("n_blocks") == "10000");

  // 10^4 blocks of Pareto(1) with m = ceil((log 10^4)^2) = 85.
  REQUIRE(run("simulate --dist pareto:alpha=1 --n 850000 --seed 2024 --out pareto.txt").code == 0);
  r = run("fit --in pareto.txt --block-size 85 --out fit.txt");
  REQUIRE(r.code == 0);
  kv = record(read_file(scratch() / "fit.txt"));
  CHECK(kv.at("n_blocks") == "10000");
  CHECK(kv.at("block_size") == "85");
  CHECK(std::abs(parse_double(kv.at("gamma_hat")) - 1.0) < 0.05);

  // Budget exhaustion is a data outcome, not a tool failure.
  r = run("fit --in gev.txt --max-iters 2");
  CHECK(r.code == 0);
  CHECK(record(r.out).at("converged") == "false");

  write_file(scratch() / "empty.txt", "");
  CHECK(run("fit --in empty.txt").code == 2);
  write_file(scratch() / "few.txt", "1\n2\n3\n4\n5\n");
  CHECK(run("fit --in few.txt --block-size 2").code == 2);
  write_file(scratch() / "const.txt", "1\n1\n1\n1\n");
  CHECK(run("fit --in const.txt").code == 2);
}

TEST_CASE("cli: gof") {
  {
    const auto data = gev_sample({0.2, 1.0, 3.0}, 20000, 77);
    std::ofstream out(scratch() / "gof.txt");
    write_values(out, data);
  }
  auto r = run("gof --in gof.txt --gamma 0.2 --mu 1 --sigma 3");
  REQUIRE(r.code == 0);
  const double good = parse_double(record(r.out).at("ks"));
  CHECK(good < 0.015);
  r = run("gof --in gof.txt --gamma 1.0 --mu 1 --sigma 3");
  CHECK(parse_double(record(r.out).at("ks")) > good);

  write_file(scratch() / "zero.txt", "0\n");
  r = run("gof --in zero.txt --gamma 0");
  CHECK(std::abs(parse_double(record(r.out).at("ks")) - 0.6321205588285577) < 1e-12);
  CHECK(run("gof --in zero.txt --gamma 0 --sigma 0").code == 2);
  write_file(scratch() / "junk.txt", "x\n");
  CHECK(run("gof --in junk.txt --gamma 0").code == 2);
}

TEST_CASE("cli: bundled study config") {
  const std::string conf = GEVMLE_SOURCE_DIR "/studies/pareto_study.conf";
  auto r = run("study --config '" + conf + "' --out-dir s1");
  REQUIRE(r.code == 0);
  const auto summary = read_file(scratch() / "s1" / "summary.txt");
  CHECK(summary.find("median_abs_gamma_error_decreasing: yes") != std::string::npos);
  CHECK(fs::exists(scratch() / "s1" / "study.csv"));
}

TEST_CASE("cli: study and plot") {
  write_file(scratch() / "small.conf",
             "distribution = cauchy\n"
             "n_grid = 50, 100\n"
             "replications = 3\n"
             "seed = 5\n"
             "crucial_lemma = true\n"
             "obstruction = true\n");
  const std::vector<std::string> files{"study.csv", "summary.txt", "crucial_lemma.csv", "obstruction.csv"};
  REQUIRE(run("study --config small.conf --out-dir r1").code == 0);
  std::map<std::string, std::string> first;
  for (const auto& f : files) first[f] = read_file(scratch() / "r1" / f);
  REQUIRE(run("study --config small.conf --out-dir r1").code == 0);
  for (const auto& f : files) {
    INFO(f);
    CHECK(!first[f].empty());
    CHECK(read_file(scratch() / "r1" / f) == first[f]);
  }

  write_file(scratch() / "budget.conf",
             "distribution = pareto:alpha=1\nn_grid = 1000000\ngrowth = fixed:m=100\nreplications = 1\nseed = 1\n");
  auto r = run("study --config budget.conf --out-dir r3");
  CHECK(r.code == 2);
  CHECK(r.err.find("budget") != std::string::npos);
  CHECK(run("study --config nope.conf --out-dir r4").code == 2);

  REQUIRE(run("plot --in r1/study.csv --out p1.svg").code == 0);
  REQUIRE(run("plot --in r1/study.csv --out p2.svg").code == 0);
  const auto svg = read_file(scratch() / "p1.svg");
  CHECK(svg == read_file(scratch() / "p2.svg"));
  std::size_t panels = 0;
  for (auto p = svg.find("class=\"panel\""); p != std::string::npos; p = svg.find("class=\"panel\"", p + 1)) ++panels;
  CHECK(panels == 3);

  write_file(scratch() / "norows.csv", "# gamma0=1\nn,m,rep,gamma_hat,mu_err,sigma_ratio,converged,ks,mean_ll_truth\n");
  CHECK(run("plot --in norows.csv --out x.svg").code == 2);
  write_file(scratch() / "schema.csv", "a,b\n1,2\n");
  CHECK(run("plot --in schema.csv --out x.svg").code == 2);
}
