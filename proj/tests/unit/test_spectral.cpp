#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "ssde/quadrature.hpp"
#include "ssde/spectral.hpp"
#include "support/oracles.hpp"

using namespace ssde;
using namespace ssde::spectral;

namespace {

DysonState random_state(int r, int m, int n, RngStream& rng, double scale = 1.0) {
  std::vector<double> l(static_cast<std::size_t>(r));
  double acc = 0.1 * scale;
  for (int i = r - 1; i >= 0; --i) {
    acc += scale * (0.2 + rng.uniform());
    l[static_cast<std::size_t>(i)] = acc;
  }
  return DysonState{l, m, n, 0.0};
}

}  // namespace

TEST_SUITE_BEGIN("spectral");

TEST_CASE("sigma_drift closed forms") {
  // single mode: no repulsion term, m-n+1 = m for n = 1
  Vector one(1);
  one << 2.0;
  const double g = 0.7, eta = 0.3, D = 0.4;
  CHECK(sigma_drift(one, 0, g, eta, D, 4, 1) ==
        doctest::Approx(-eta * g + eta * D * 4.0 / (2.0 * 2.0)).epsilon(1e-14));

  // two modes, square matrix: (m-n+1)/(2 sigma_1) = 1/4 and the repulsion
  // term sigma_1/(sigma_1^2 - sigma_2^2) = 2/3
  Vector two(2);
  two << 2.0, 1.0;
  CHECK(sigma_drift(two, 0, 0.0, eta, D, 6, 6) ==
        doctest::Approx(eta * D * (0.25 + 2.0 / 3.0)).epsilon(1e-14));

  // diag(3, 1): 1/(2*3) + 3/(9-1)
  Vector diag(2);
  diag << 3.0, 1.0;
  CHECK(sigma_drift(diag, 0, 0.0, eta, D, 2, 2) ==
        doctest::Approx(eta * D * (1.0 / 6.0 + 3.0 / 8.0)).epsilon(1e-14));
}

TEST_CASE("sigma_drift rejects bad inputs") {
  Vector s(2);
  s << 2.0, 2.0;
  CHECK_THROWS_AS(sigma_drift(s, 0, 0.0, 1.0, 1.0, 3, 2), DegeneracyError);
  Vector neg(1);
  neg << -1.0;
  CHECK_THROWS_AS(sigma_drift(neg, 0, 0.0, 1.0, 1.0, 3, 1), DomainError);
  Vector ok(1);
  ok << 1.0;
  CHECK_THROWS_AS(sigma_drift(ok, 0, 0.0, 1.0, 1.0, 2, 3), DomainError);
}

TEST_CASE("lambda_drift single particle and degeneracy") {
  DysonState s{{2.5}, 7, 3, 0.0};
  Vector d = lambda_drift(s, Vector(), 0.5, 0.2);
  CHECK(d(0) == doctest::Approx(0.5 * 0.2 * (7 - 3 + 3)).epsilon(1e-14));

  DysonState bad{{2.0, 2.0 - 1e-14}, 5, 5, 0.0};
  CHECK_THROWS_AS(validate_dyson(bad), DomainError);
}

TEST_CASE("pairwise repulsion identity") {
  // sum_k sum_{j!=k} lambda_k/(lambda_k - lambda_j) = r(r-1)/2, exactly
  RngStream rng(21, "dyson");
  for (int trial = 0; trial < 50; ++trial) {
    const int r = 2 + static_cast<int>(rng.uniform() * 14);
    DysonState s = random_state(r, r + 3, r, rng);
    double total = 0.0;
    for (int k = 0; k < r; ++k) {
      for (int j = 0; j < r; ++j) {
        if (j == k) continue;
        total += s.lambdas[static_cast<std::size_t>(k)] /
                 (s.lambdas[static_cast<std::size_t>(k)] - s.lambdas[static_cast<std::size_t>(j)]);
      }
    }
    CHECK(total == doctest::Approx(0.5 * r * (r - 1)).epsilon(1e-9));
  }
}

TEST_CASE("zero-gradient trace drift is eta D r (m-n+2+r)") {
  RngStream rng(22, "dyson");
  for (int trial = 0; trial < 20; ++trial) {
    const int r = 2 + static_cast<int>(rng.uniform() * 10);
    const int mn_gap = static_cast<int>(rng.uniform() * 5);
    DysonState s = random_state(r, r + mn_gap, r, rng);
    const double eta = 0.5 + rng.uniform(), D = 0.1 + rng.uniform();
    Vector d = lambda_drift(s, Vector(), eta, D);
    CHECK(d.sum() == doctest::Approx(eta * D * r * (mn_gap + 2 + r)).epsilon(1e-9));
  }
}

TEST_CASE("ito consistency between sigma_drift and lambda_drift") {
  // lambda_k = sigma_k^2 gives d lambda = 2 sigma d sigma + 2 eta D dt
  RngStream rng(23, "ito");
  for (int trial = 0; trial < 20; ++trial) {
    const int r = 2 + static_cast<int>(rng.uniform() * 6);
    const int m = r + static_cast<int>(rng.uniform() * 4);
    DysonState s = random_state(r, m, r, rng);
    const double eta = 0.3, D = 0.7;
    Vector g(r);
    for (int k = 0; k < r; ++k) g(k) = rng.gaussian();
    Vector sig(r);
    for (int k = 0; k < r; ++k) sig(k) = std::sqrt(s.lambdas[static_cast<std::size_t>(k)]);
    Vector ld = lambda_drift(s, g, eta, D);
    for (int k = 0; k < r; ++k) {
      const double sd = sigma_drift(sig, k, g(k), eta, D, m, r);
      CHECK(ld(k) == doctest::Approx(2.0 * sig(k) * sd + 2.0 * eta * D).epsilon(1e-12));
    }
  }
}

TEST_CASE("frozen dynamics at D = 0 with zero gradient") {
  RngStream rng(24, "dyson");
  DysonState s0 = random_state(5, 8, 5, rng);
  auto [s1, stats] = simulate_dyson(s0, 1.0, 0.0, 100, 0.01, rng);
  for (int k = 0; k < 5; ++k) {
    CHECK(s1.lambdas[static_cast<std::size_t>(k)] == s0.lambdas[static_cast<std::size_t>(k)]);
  }
  CHECK(stats.bisection_events == 0);
}

TEST_CASE("ordering is preserved at every recorded step") {
  RngStream rng(25, "dyson");
  DysonState s0 = random_state(10, 14, 10, rng);
  long violations = 0;
  auto [s1, stats] = simulate_dyson(
      s0, 1.0, 5e-3, 400, 0.01, rng,
      [&](const DysonState& s) {
        for (int k = 1; k < s.r(); ++k) {
          if (!(s.lambdas[static_cast<std::size_t>(k - 1)] >
                s.lambdas[static_cast<std::size_t>(k)])) {
            ++violations;
          }
        }
      });
  CHECK(violations == 0);
  CHECK(stats.steps == 400);
}

TEST_CASE("ensemble trace growth matches the drift identity") {
  // r = 8, m-n = 2: slope of E[sum lambda] should be eta D r (m-n+2+r)
  const int r = 8, replicas = 100;
  const double eta = 1.0, D = 1e-3, dt = 0.02;
  const long steps = 4000;
  std::vector<double> l0(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k) l0[static_cast<std::size_t>(k)] = 0.1 * (r - k);
  std::vector<double> mean_path(static_cast<std::size_t>(steps + 1), 0.0);
  for (int rep = 0; rep < replicas; ++rep) {
    RngStream rng(900, "trace", static_cast<std::uint64_t>(rep));
    DysonState s{l0, r + 2, r, 0.0};
    long idx = 0;
    simulate_dyson(s, eta, D, steps, dt, rng, [&](const DysonState& st) {
      mean_path[static_cast<std::size_t>(idx++)] +=
          std::accumulate(st.lambdas.begin(), st.lambdas.end(), 0.0) / replicas;
    });
  }
  // least-squares slope of the mean path
  const double T = steps * dt;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < mean_path.size(); ++i) {
    const double t = static_cast<double>(i) * dt;
    sx += t;
    sy += mean_path[i];
    sxx += t * t;
    sxy += t * mean_path[i];
  }
  const double n = static_cast<double>(mean_path.size());
  const double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  const double want = eta * D * r * (2 + 2 + r);
  CHECK(slope == doctest::Approx(want).epsilon(0.10));
  (void)T;
}

TEST_CASE("time rescaling maps to the canonical dyson form") {
  // lambda run at (eta, D) over T equals the canonical-coefficient run
  // (eta D = 1/2) over S = 2 eta D T, in distribution; compare first two
  // ensemble moments of each particle
  const int r = 6, replicas = 160;
  const double eta = 1.0, D = 1e-3, dt = 0.01;
  const long steps = 3000;
  const double dt_canonical = 2.0 * eta * D * dt;  // same step count covers S = 2 eta D T
  std::vector<double> l0(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k) l0[static_cast<std::size_t>(k)] = 0.3 * (r - k);

  Matrix final_a(replicas, r), final_b(replicas, r);
  for (int rep = 0; rep < replicas; ++rep) {
    RngStream ra(901, "rescale-a", static_cast<std::uint64_t>(rep));
    RngStream rb(902, "rescale-b", static_cast<std::uint64_t>(rep));
    DysonState sa{l0, r + 3, r, 0.0};
    DysonState sb = sa;
    auto [fa, stats_a] = simulate_dyson(sa, eta, D, steps, dt, ra);
    auto [fb, stats_b] = simulate_dyson(sb, 1.0, 0.5, steps, dt_canonical, rb);
    for (int k = 0; k < r; ++k) {
      final_a(rep, k) = fa.lambdas[static_cast<std::size_t>(k)];
      final_b(rep, k) = fb.lambdas[static_cast<std::size_t>(k)];
    }
  }
  for (int k = 0; k < r; ++k) {
    const double ma = final_a.col(k).mean(), mb = final_b.col(k).mean();
    const double va = (final_a.col(k).array() - ma).square().sum() / (replicas - 1);
    const double vb = (final_b.col(k).array() - mb).square().sum() / (replicas - 1);
    const double se = std::sqrt((va + vb) / replicas);
    CHECK(std::abs(ma - mb) < 4.0 * se + 0.01 * std::abs(ma));
  }
}

TEST_CASE("persistent collisions raise an integration error") {
  // the nearly-degenerate bottom pair repels so hard that the middle particle
  // overshoots the top one even after twenty dt bisections
  RngStream rng(26, "collide");
  DysonState s{{1.1, 1.0, 1.0 - 1e-9}, 5, 3, 0.0};
  CHECK_THROWS_AS(simulate_dyson(s, 1.0, 0.5, 10, 1.0, rng), IntegrationError);
}

TEST_CASE("near-collisions engage bisection and recover") {
  RngStream rng(27, "bisect");
  DysonState s{{1.0, 0.99, 0.2}, 5, 3, 0.0};
  auto [out, stats] = simulate_dyson(s, 1.0, 0.02, 800, 0.05, rng);
  CHECK(stats.bisection_events > 0);
  CHECK(stats.max_depth > 0);
  validate_dyson(out);
}

TEST_CASE("stationary params and density basics") {
  StationaryParams p{1.0, 1e-3, 0.05, 20, 16};
  CHECK(p.shape() == doctest::Approx((20 - 16 + 3) / 4.0));
  CHECK(p.rate() == doctest::Approx(0.05 / (4e-3)));
  CHECK_THROWS_AS(stationary_lambda_pdf(-1.0, p), DomainError);
  CHECK_THROWS_AS(stationary_lambda_pdf(0.0, p), DomainError);
  CHECK_THROWS_AS(stationary_sigma_pdf(0.0, p), DomainError);
  StationaryParams bad{1.0, 1e-3, 0.05, 3, 16};
  CHECK_THROWS_AS(stationary_lambda_pdf(1.0, bad), DomainError);
}

TEST_CASE("stationary density normalizes and has the gamma mean") {
  for (int gap : {0, 1, 4}) {
    StationaryParams p{1.0, 2e-3, 0.1, 16 + gap, 16};
    const double upper = (p.shape() + 45.0) / p.rate();
    const double mass = integrate(
        [&](double s) { return stationary_sigma_pdf(s, p); }, 1e-12, std::sqrt(upper), 1e-12);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    const double mean = integrate(
        [&](double s) { return s * s * stationary_sigma_pdf(s, p); }, 1e-12, std::sqrt(upper),
        1e-12);
    CHECK(mean == doctest::Approx(p.alpha0() / p.beta1).epsilon(1e-6));
  }
}

TEST_CASE("m = n+1 gives an exponential stationary law") {
  StationaryParams p{1.0, 1e-2, 0.2, 17, 16};
  CHECK(p.shape() == doctest::Approx(1.0));
  for (double l : {0.1, 0.5, 2.0}) {
    CHECK(stationary_lambda_pdf(l, p) ==
          doctest::Approx(p.rate() * std::exp(-p.rate() * l)).epsilon(1e-12));
  }
}

TEST_CASE("pushforward identity p_sigma = 2 sigma p_lambda(sigma^2)") {
  StationaryParams p{0.7, 3e-3, 0.15, 21, 16};
  for (double s = 0.05; s < 4.0; s += 0.05) {
    CHECK(stationary_sigma_pdf(s, p) ==
          doctest::Approx(2.0 * s * stationary_lambda_pdf(s * s, p)).epsilon(1e-12));
  }
}

TEST_CASE("sigma density mode and small-sigma behavior") {
  StationaryParams p{1.0, 1e-3, 0.08, 22, 16};
  // numeric argmax vs sqrt((m-n+1) eta D / beta1)
  const double want = std::sqrt((p.m - p.n + 1) * p.eta * p.D / p.beta1);
  double best_s = 0.0, best_v = -1.0;
  for (double s = 1e-4; s < 2.0; s += 1e-4) {
    const double v = stationary_sigma_pdf(s, p);
    if (v > best_v) {
      best_v = v;
      best_s = s;
    }
  }
  CHECK(best_s == doctest::Approx(want).epsilon(1e-3));

  // m = n: density vanishes like sigma^{1/2}
  StationaryParams sq{1.0, 1e-3, 0.08, 16, 16};
  const double r1 = stationary_sigma_pdf(1e-6, sq) / std::sqrt(1e-6);
  const double r2 = stationary_sigma_pdf(1e-8, sq) / std::sqrt(1e-8);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-3));
}

TEST_CASE("stationary exponent closed forms") {
  CHECK(stationary_exponent(16, 16) == doctest::Approx(-0.25));
  CHECK(stationary_exponent(17, 16) == doctest::Approx(0.0));
  CHECK(stationary_exponent(21, 16) == doctest::Approx(1.0));
  CHECK_THROWS_AS(stationary_exponent(15, 16), DomainError);
  // must equal the power exponent of the stationary lambda density
  StationaryParams p{1.0, 1e-3, 0.05, 21, 16};
  CHECK(stationary_exponent(21, 16) == doctest::Approx(p.shape() - 1.0));
}

TEST_CASE("gamma MLE recovers a known gamma law") {
  // independent sampling route: std::gamma_distribution
  std::mt19937_64 engine(4242);
  std::gamma_distribution<double> gamma(0.75, 0.5);  // shape 0.75, rate 2
  std::vector<double> samples(100000);
  for (auto& s : samples) s = gamma(engine);
  GammaFitResult fit = fit_stationary(samples, 16, 16, 1.0, 1.0);
  CHECK(fit.shape == doctest::Approx(0.75).epsilon(0.02));
  CHECK(fit.rate == doctest::Approx(2.0).epsilon(0.02));
  CHECK(fit.gof < 0.01);
  CHECK(fit.theoretical_shape == doctest::Approx(0.75));
}

TEST_CASE("gamma fit failure modes") {
  std::vector<double> constant(50, 3.0);
  CHECK_THROWS_AS(fit_stationary(constant, 16, 16, 1.0, 1.0), FitError);
  std::vector<double> few = {1.0, 2.0};
  CHECK_THROWS_AS(fit_stationary(few, 16, 16, 1.0, 1.0), DomainError);
  std::vector<double> negative(40, 1.0);
  negative[7] = -0.5;
  CHECK_THROWS_AS(fit_stationary(negative, 16, 16, 1.0, 1.0), DomainError);
}

TEST_CASE("one-particle stationary run recovers the parameter-free shape") {
  for (int gap : {0, 4}) {
    StationaryParams p{1.0, 1e-3, 0.05, 16 + gap, 16};
    RngStream rng(31, "stationary", static_cast<std::uint64_t>(gap));
    auto samples = simulate_stationary_lambda(p, 20000, rng);
    GammaFitResult fit = fit_stationary(samples, p.m, p.n, p.eta, p.D);
    CHECK(fit.shape == doctest::Approx(p.shape()).epsilon(0.10));
    CHECK(fit.rate == doctest::Approx(p.rate()).epsilon(0.10));
    CHECK(fit.implied_beta1 == doctest::Approx(p.beta1).epsilon(0.10));
  }
}

TEST_CASE("euler and exact stationary samplers agree") {
  StationaryParams p{1.0, 1e-3, 0.08, 20, 16};  // shape 1.75, safely positive
  RngStream r1(32, "st-exact");
  RngStream r2(33, "st-euler");
  auto exact = simulate_stationary_lambda(p, 12000, r1);
  StationarySimOptions opt;
  opt.scheme = StationaryScheme::EulerMaruyama;
  auto euler = simulate_stationary_lambda(p, 12000, r2, opt);
  GammaFitResult fe = fit_stationary(exact, p.m, p.n, p.eta, p.D);
  GammaFitResult fu = fit_stationary(euler, p.m, p.n, p.eta, p.D);
  CHECK(fe.shape == doctest::Approx(fu.shape).epsilon(0.08));
  CHECK(fe.rate == doctest::Approx(fu.rate).epsilon(0.08));
}

TEST_CASE("hilbert transform of sqrt density matches the closed form") {
  // alpha = 1/2 admits the exact value (2 sqrt(R) + sqrt(l) ln((sqrt(R)-sqrt(l))/(sqrt(R)+sqrt(l))))/pi
  const double R = 100.0, l = 1.0;
  const double closed = (2.0 * std::sqrt(R) + std::log(9.0 / 11.0)) / M_PI;
  const double numeric = hilbert_power_law(0.5, 1.0, l, R);
  CHECK(numeric == doctest::Approx(closed).epsilon(1e-6));
  // leading term C l^alpha cot(pi alpha) vanishes at alpha = 1/2; the rest is
  // the R-dependent remainder
  CHECK(std::abs(numeric) < 2.0 * std::sqrt(R) / M_PI + 1.0);
}

TEST_CASE("hilbert transform is linear in the coefficient") {
  const double a = hilbert_power_law(0.3, 1.0, 0.7, 5.0);
  const double b = hilbert_power_law(0.3, 2.0, 0.7, 5.0);
  CHECK(b == doctest::Approx(2.0 * a).epsilon(1e-12));
}

TEST_CASE("hilbert transform diverges logarithmically at the right edge") {
  const double R = 4.0;
  double prev = hilbert_power_law(0.5, 1.0, 0.9 * R, R);
  for (double frac : {0.99, 0.999, 0.9999}) {
    const double v = hilbert_power_law(0.5, 1.0, frac * R, R);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < hilbert_power_law(0.5, 1.0, 0.9 * R, R) - 1.0);
}

TEST_CASE("hilbert transform domain errors") {
  CHECK_THROWS_AS(hilbert_power_law(1.0, 1.0, 0.5, 2.0), DomainError);
  CHECK_THROWS_AS(hilbert_power_law(0.5, 1.0, -0.1, 2.0), DomainError);
  CHECK_THROWS_AS(hilbert_power_law(0.5, 1.0, 2.5, 2.0), DomainError);
  CHECK_THROWS_AS(hilbert_power_law(-1.5, 1.0, 0.5, 2.0), DomainError);
}

TEST_SUITE_END();
