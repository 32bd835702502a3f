#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "gevmle/gev.hpp"
#include "gevmle/reference.hpp"
#include "oracles.hpp"

using namespace gevmle;
using Catch::Approx;

TEST_CASE("normalizing constants for the three tail classes") {
  const auto p = norm_constants(pareto(1.0), 100);
  CHECK(p.a == Approx(100.0).epsilon(1e-14));
  CHECK(p.b == Approx(100.0).epsilon(1e-14));
  CHECK(p.m == 100);

  const auto e = norm_constants(exponential(), 100);
  CHECK(e.a == Approx(1.0).epsilon(1e-13));
  CHECK(e.b == Approx(std::log(100.0)).epsilon(1e-14));

  const auto b = norm_constants(beta_tail(2.0), 100);
  CHECK(b.a == Approx(0.05).epsilon(1e-13));
  CHECK(b.b == Approx(0.9).epsilon(1e-14));

  const auto p2 = norm_constants(pareto(2.0), 400);
  CHECK(p2.a == Approx(10.0).epsilon(1e-14));  // gamma0 U(m) = 0.5 * sqrt(400)
  CHECK(p2.b == Approx(20.0).epsilon(1e-14));
}

TEST_CASE("gamma0 = 0 fallback integrates U numerically") {
  // Exponential shifted to start at 2; U(s) is taken as 2 on (0, 1].
  const auto shifted = ReferenceDistribution::from_quantile(
      "shifted-exponential", 0.0, [](double u) { return 2.0 - std::log1p(-u); }, 2.0, kPlusInf);
  for (std::size_t m : {10u, 100u, 10000u}) {
    const auto c = norm_constants(shifted, m);
    const double t = static_cast<double>(m);
    // int_0^t U = 2 + int_1^t (2 + log s) ds = t log t + t + 1
    const double expected = (2.0 + std::log(t)) - (t * std::log(t) + t + 1.0) / t;
    CHECK(c.a == Approx(expected).epsilon(1e-9));
    CHECK(c.b == Approx(2.0 + std::log(t)).epsilon(1e-14));
  }
}

TEST_CASE("constants that do not exist raise ConfigError") {
  CHECK_THROWS_AS(norm_constants(gev_member(0.0), 100), ConfigError);  // U not integrable near 0
  const auto logistic = ReferenceDistribution::from_quantile(
      "logistic", 0.0, [](double u) { return std::log(u / (1 - u)); }, kMinusInf, kPlusInf);
  CHECK_THROWS_AS(norm_constants(logistic, 50), ConfigError);
  // Cauchy at m = 1: U(1) = 1 / tan(pi) < 0.
  CHECK_THROWS_AS(norm_constants(cauchy(), 1), ConfigError);
  CHECK_NOTHROW(norm_constants(cauchy(), 3));
}

TEST_CASE("sample_iid examples") {
  const auto par = sample_iid(pareto(1.0), 100000, 1);
  for (double x : par) REQUIRE(x >= 1.0);

  const auto ex = sample_iid(exponential(), 100000, 2);
  const double mean = std::accumulate(ex.begin(), ex.end(), 0.0) / ex.size();
  CHECK(std::abs(mean - 1.0) < 0.02);

  const auto ca = sample_iid(cauchy(), 100000, 3);
  CHECK(std::any_of(ca.begin(), ca.end(), [](double x) { return x < 0; }));

  CHECK(sample_iid(cauchy(), 10, 9) == sample_iid(cauchy(), 10, 9));
}

TEST_CASE("catalog composition") {
  const auto cat = catalog();
  CHECK(cat.size() >= 5);
  for (double g : {-0.5, 0.0, 0.5, 1.0}) {
    CHECK(std::any_of(cat.begin(), cat.end(), [g](const auto& d) { return d.gamma0 == g; }));
  }
  CHECK(pareto(2.0).gamma0 == 0.5);
  CHECK(cauchy().left_endpoint == kMinusInf);
  CHECK(cauchy().gamma0 == 1.0);
  for (const auto& d : cat) {
    CHECK(d.gamma0 > -1.0);
    CHECK(d.cdf);
  }
}

TEST_CASE("Cauchy tail quantile grows like t / pi") {
  const auto c = cauchy();
  double prev = kPlusInf;
  for (double t : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    const double err = std::abs(c.tail_quantile(t) / (t / std::numbers::pi) - 1.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-10);
}

TEST_CASE("tail_quantile agrees with quantile(1 - 1/t)") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logt(0.01, 7.0);
  for (const auto& d : catalog()) {
    double prev = kMinusInf;
    std::vector<double> ts;
    for (int i = 0; i < 200; ++i) ts.push_back(std::exp(logt(rng)));
    std::sort(ts.begin(), ts.end());
    for (double t : ts) {
      const double u = d.tail_quantile(t);
      const double q = d.quantile(1.0 - 1.0 / t);
      CHECK(std::abs(u - q) <= 1e-12 * std::max(1.0, std::abs(q)));
      CHECK(u >= prev);
      prev = u;
    }
  }
}

TEST_CASE("F^m(a_m x + b_m) approaches F_gamma0") {
  for (const auto& d : catalog()) {
    double prev = kPlusInf;
    bool usable = true;
    for (std::size_t m : {100u, 1000u, 10000u}) {
      NormalizingConstants c;
      try {
        c = norm_constants(d, m);
      } catch (const ConfigError&) {
        usable = false;
        break;
      }
      double worst = 0.0;
      for (double x = -3.0; x <= 6.0; x += 0.05) {
        const double f = d.cdf(c.a * x + c.b);
        const double fm = f <= 0.0 ? 0.0 : std::exp(static_cast<double>(m) * std::log(f));
        worst = std::max(worst, std::abs(fm - gev_cdf(d.gamma0, x)));
      }
      INFO(d.name << " m=" << m << " err=" << worst);
      CHECK(worst < prev);
      prev = worst;
    }
    if (!usable) {
      CHECK(d.name == "gev:gamma=0");
    } else {
      CHECK(prev < 0.01);
    }
  }
}

TEST_CASE("parse_distribution") {
  CHECK(parse_distribution("pareto:alpha=2").gamma0 == 0.5);
  CHECK(parse_distribution("pareto").gamma0 == 1.0);
  CHECK(parse_distribution("beta-tail:beta=4").gamma0 == -0.25);
  CHECK(parse_distribution("gev:gamma=-0.5").right_endpoint == Approx(2.0));
  CHECK(parse_distribution("cauchy").name == "cauchy");
  CHECK(parse_distribution("pareto:alpha=1").name == "pareto:alpha=1");
  CHECK_THROWS_AS(parse_distribution("uniform"), ConfigError);
  CHECK_THROWS_AS(parse_distribution("beta-tail:beta=1"), ConfigError);
  CHECK_THROWS_AS(parse_distribution("gev:gamma=-1"), ConfigError);
  CHECK_THROWS_AS(parse_distribution("normal"), ConfigError);
  CHECK_THROWS_AS(parse_distribution("pareto:beta=2"), ConfigError);
  CHECK_THROWS_AS(parse_distribution("pareto:alpha=-1"), ConfigError);
  CHECK_THROWS_AS(parse_distribution(""), ConfigError);
}
