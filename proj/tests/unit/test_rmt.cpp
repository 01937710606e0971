#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "doctest.h"
#include "ssde/quadrature.hpp"
#include "ssde/rmt.hpp"
#include "ssde/special.hpp"
#include "ssde/svd.hpp"
#include "support/oracles.hpp"

using namespace ssde;
using namespace ssde::rmt;

TEST_SUITE_BEGIN("rmt");

TEST_CASE("mp_support closed forms") {
  auto [lo1, hi1] = mp_support(1.0, 1.0);
  CHECK(lo1 == doctest::Approx(0.0));
  CHECK(hi1 == doctest::Approx(4.0));
  auto [lo2, hi2] = mp_support(0.25, 1.0);
  CHECK(lo2 == doctest::Approx(0.25));
  CHECK(hi2 == doctest::Approx(2.25));
  auto [lo3, hi3] = mp_support(1.0, 2.0);
  CHECK(lo3 == doctest::Approx(0.0));
  CHECK(hi3 == doctest::Approx(8.0));
  CHECK_THROWS_AS(mp_support(1.5, 1.0), DomainError);
  CHECK_THROWS_AS(mp_support(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(mp_support(0.5, -1.0), DomainError);
}

TEST_CASE("mp_density support boundaries and positivity") {
  MPParams p = mp_params(1.0, 1.0);
  CHECK(mp_density(4.0, p) == 0.0);
  CHECK(mp_density(5.0, p) == 0.0);
  CHECK(mp_density(0.0, p) == 0.0);
  CHECK(mp_density(-1.0, p) == 0.0);
  for (double x = 0.05; x < 4.0; x += 0.05) CHECK(mp_density(x, p) >= 0.0);
}

TEST_CASE("mp_density integrates to one") {
  // adaptive quadrature oracle; at gamma = 1 the density has an integrable
  // x^{-1/2} divergence at zero, handled by integrating in u = sqrt(x)
  for (auto [gamma, scale] : {std::pair{1.0, 1.0}, {0.25, 1.0}, {0.6, 2.0}}) {
    MPParams p = mp_params(gamma, scale);
    double mass;
    if (p.lambda_minus == 0.0) {
      mass = integrate([&](double u) { return 2.0 * u * mp_density(u * u, p); }, 1e-12,
                       std::sqrt(p.lambda_plus) - 1e-12, 1e-9);
    } else {
      const double eps = 1e-9 * (p.lambda_plus - p.lambda_minus);
      mass = integrate([&](double x) { return mp_density(x, p); }, p.lambda_minus + eps,
                       p.lambda_plus - eps, 1e-9);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("mp_cdf agrees with direct quadrature of the density") {
  MPParams p = mp_params(0.5, 1.5);
  for (double x : {0.3, 0.9, 2.0, 3.0}) {
    const double direct = integrate([&](double t) { return mp_density(t, p); },
                                    p.lambda_minus + 1e-10, x, 1e-10);
    CHECK(mp_cdf(x, p) == doctest::Approx(direct).epsilon(1e-7));
  }
  CHECK(mp_cdf(p.lambda_minus, p) == 0.0);
  CHECK(mp_cdf(p.lambda_plus, p) == 1.0);
  double prev = -1.0;
  for (double x = 0.0; x <= 4.1; x += 0.05) {
    const double f = mp_cdf(x, p);
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("edge_scaling closed forms and scaling law") {
  EdgeScaling sq = edge_scaling(100, 100, 1.0);
  CHECK(sq.mu == doctest::Approx(4.0));
  CHECK(sq.sigma == doctest::Approx(2.0 * std::cbrt(2.0) / std::pow(100.0, 2.0 / 3.0)));

  EdgeScaling rect = edge_scaling(400, 100, 1.0);
  CHECK(rect.mu == doctest::Approx(2.25));
  CHECK(rect.sigma == doctest::Approx(1.5 * std::cbrt(3.0) / std::pow(400.0, 2.0 / 3.0)));

  // scaling both dimensions by 4 holds mu and divides sigma by 4^{2/3}
  EdgeScaling big = edge_scaling(1600, 400, 1.0);
  CHECK(big.mu == doctest::Approx(rect.mu));
  CHECK(big.sigma == doctest::Approx(rect.sigma / std::pow(4.0, 2.0 / 3.0)));

  CHECK_THROWS_AS(edge_scaling(99, 100, 1.0), DomainError);
}

TEST_CASE("edge constants center the Monte-Carlo largest eigenvalue") {
  // mean of the scaled largest eigenvalue should sit near the Tracy-Widom
  // mean (~ -1.21); a wrong sigma convention would put it far outside
  auto chi = oracles::wishart_edge_samples(400, 100, 300, 2024);
  const double m = oracles::mean(chi);
  CHECK(m > -1.6);
  CHECK(m < -0.85);
}

TEST_CASE("tw1_cdf is monotone with correct tails") {
  CHECK(tw1_cdf(-10.0) < 1e-6);
  CHECK(tw1_cdf(8.0) > 1.0 - 1e-6);
  double prev = -1.0;
  for (double s = -12.0; s <= 10.0; s += 0.01) {
    const double f = tw1_cdf(s);
    CHECK(f >= prev - 1e-15);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    prev = f;
  }
}

TEST_CASE("tw1_cdf median matches a Wishart ensemble") {
  auto chi = oracles::wishart_edge_samples(200, 200, 500, 77);
  const double mc_median = oracles::median(chi);
  // invert the table at 1/2
  double lo = -5.0, hi = 3.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tw1_cdf(mid) < 0.5 ? lo : hi) = mid;
  }
  const double table_median = 0.5 * (lo + hi);
  CHECK(std::abs(table_median - mc_median) < 0.2);
}

TEST_CASE("ks_distance analytic one-point case and errors") {
  EmpiricalSpectrum one({0.5});
  CHECK(ks_distance(one, [](double x) { return x; }) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_distance(EmpiricalSpectrum({}), [](double) { return 0.0; }), DomainError);
}

TEST_CASE("ks_distance shrinks for samples from the reference") {
  RngStream rng(5, "ks");
  std::vector<double> u(4000);
  for (auto& x : u) x = rng.uniform();
  EmpiricalSpectrum spec(u);
  CHECK(ks_distance(spec, [](double x) { return std::clamp(x, 0.0, 1.0); }) < 0.04);
}

TEST_CASE("ks_distance is invariant under monotone reparameterization") {
  RngStream rng(6, "ks");
  std::vector<double> raw(500), mapped(500);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = rng.gamma(2.0);
    mapped[i] = std::exp(raw[i]);
  }
  std::function<double(double)> base_cdf = [](double x) { return gamma_p(2.0, x); };
  std::function<double(double)> mapped_cdf = [](double y) {
    return y <= 0.0 ? 0.0 : gamma_p(2.0, std::log(y));
  };
  const double d1 = ks_distance(EmpiricalSpectrum(raw), base_cdf);
  const double d2 = ks_distance(EmpiricalSpectrum(mapped), mapped_cdf);
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("gaussian init passes the MP bulk test") {
  // squared singular values of a 200x200 N(0, 1/n) matrix vs the MP CDF;
  // below 0.05 in at least 11 of 12 seeds
  int failures = 0;
  for (int seed = 0; seed < 12; ++seed) {
    RngStream rng(static_cast<std::uint64_t>(seed), "mp-init");
    const int n = 200;
    Matrix W = gaussian_matrix(n, n, rng, 1.0 / std::sqrt(n));
    Vector s = singular_values(W);
    std::vector<double> lambda(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) lambda[static_cast<std::size_t>(i)] = s(i) * s(i) / n;
    MPParams p = mp_params(1.0, 1.0 / n);
    const double d = ks_distance(EmpiricalSpectrum(lambda), [&](double x) { return mp_cdf(x, p); });
    if (d >= 0.05) ++failures;
  }
  CHECK(failures <= 1);
}

TEST_CASE("tail_count_beyond_edge") {
  EdgeScaling edge = edge_scaling(100, 100, 1.0);
  EmpiricalSpectrum below({3.0, 2.0, 1.0});
  CHECK(tail_count_beyond_edge(below, edge, 0.0) == 0);
  CHECK(tail_count_beyond_edge(below, edge, -std::numeric_limits<double>::infinity()) == 3);
  EmpiricalSpectrum mixed({edge.mu + 5.0 * edge.sigma, edge.mu, 1.0});
  CHECK(tail_count_beyond_edge(mixed, edge, 4.0) == 1);
  CHECK_THROWS_AS(tail_count_beyond_edge(EmpiricalSpectrum({}), edge, 0.0), DomainError);
}

TEST_CASE("fresh gaussian init rarely exceeds the scaled edge") {
  // threshold 4 sits deep in the Tracy-Widom right tail
  int beyond_total = 0;
  int zeros = 0;
  for (int seed = 0; seed < 20; ++seed) {
    RngStream rng(static_cast<std::uint64_t>(seed), "tw-tail");
    const int n = 100;
    Matrix W = gaussian_matrix(n, n, rng);
    Vector s = singular_values(W);
    std::vector<double> lambda(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) lambda[static_cast<std::size_t>(i)] = s(i) * s(i) / n;
    EdgeScaling edge = edge_scaling(n, n, 1.0);
    const int c = tail_count_beyond_edge(EmpiricalSpectrum(lambda), edge, 4.0);
    CHECK(c <= 1);
    beyond_total += c;
    if (c == 0) ++zeros;
  }
  CHECK(zeros >= 18);
  CHECK(beyond_total <= 2);
}

TEST_SUITE_END();
