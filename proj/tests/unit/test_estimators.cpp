#include <cmath>
#include <vector>

#include "doctest.h"
#include "ssde/estimators.hpp"
#include "ssde/sde.hpp"
#include "ssde/spectral.hpp"
#include "support/oracles.hpp"

using namespace ssde;
using namespace ssde::estimators;

TEST_SUITE_BEGIN("estimators");

TEST_CASE("estimate_diffusion closed forms") {
  SpectrumSnapshot flat{0, {2.0, 2.0, 2.0}};
  CHECK(estimate_diffusion({flat}, 10.0) == doctest::Approx(0.0));
  SpectrumSnapshot spread{0, {5.0, 3.0, 1.0}};
  CHECK(estimate_diffusion({spread}, 100.0) == doctest::Approx(0.04));
  CHECK_THROWS_AS(estimate_diffusion({spread}, 0.0), DomainError);
  CHECK_THROWS_AS(estimate_diffusion({}, 1.0), DomainError);
}

TEST_CASE("estimate_diffusion is invariant under common shifts") {
  SpectrumSnapshot a{0, {5.0, 3.0, 1.0}};
  SpectrumSnapshot b{0, {7.5, 5.5, 3.5}};
  CHECK(estimate_diffusion({a}, 50.0) == doctest::Approx(estimate_diffusion({b}, 50.0)));
}

TEST_CASE("estimate_diffusion lands within a factor of three on pure noise") {
  // dimensional estimator with an O(n) bias, so the check uses the smallest
  // nontrivial spectrum; medians over replicas tame the fluctuations
  const double eta = 1.0, D = 0.1, dt = 1.0;
  const long T = 400;
  std::vector<double> estimates;
  for (int rep = 0; rep < 60; ++rep) {
    RngStream rng(50, "dhat", static_cast<std::uint64_t>(rep));
    sde::WeightState w{Matrix::Zero(2, 2), 0, 0.0};
    sde::SDEParams p{eta, D, dt};
    sde::WeightState out = sde::simulate_weights(w, nullptr, p, T, rng);
    SpectrumSnapshot snap;
    Vector s = singular_values(out.matrix);
    snap.values.assign(s.data(), s.data() + s.size());
    estimates.push_back(estimate_diffusion({snap}, static_cast<double>(T)));
  }
  const double med = oracles::median(estimates);
  CHECK(med > D / 3.0);
  CHECK(med < 3.0 * D);
}

TEST_CASE("estimate_beta1 exact cases") {
  RngStream rng(51, "beta1");
  Matrix g = gaussian_matrix(4, 3, rng);
  // identical per-example gradients: no noise
  NoiseStats same = estimate_beta1({g, g, g}, 2, rng);
  CHECK(same.beta1 == doctest::Approx(0.0));
  CHECK(same.exact);
  // two examples {g, -g}, B = 1: full enumeration gives ||g||^2 exactly
  NoiseStats pm = estimate_beta1({g, Matrix(-g)}, 1, rng);
  CHECK(pm.beta1 == doctest::Approx(g.squaredNorm()).epsilon(1e-15));
  CHECK(pm.exact);
  CHECK(pm.se == 0.0);
  // full batch: sampling without replacement leaves no noise
  NoiseStats full = estimate_beta1({g, Matrix(-g), Matrix(2.0 * g)}, 3, rng);
  CHECK(full.beta1 == doctest::Approx(0.0));
  CHECK_THROWS_AS(estimate_beta1({g}, 1, rng), DomainError);
  CHECK_THROWS_AS(estimate_beta1({g, g}, 3, rng), DomainError);
}

TEST_CASE("estimate_beta1 is invariant under example reordering") {
  RngStream rng(52, "beta1");
  std::vector<Matrix> grads;
  for (int i = 0; i < 6; ++i) grads.push_back(gaussian_matrix(3, 3, rng));
  std::vector<Matrix> reversed(grads.rbegin(), grads.rend());
  RngStream r1(53, "mc"), r2(53, "mc");
  NoiseStats a = estimate_beta1(grads, 2, r1);
  NoiseStats b = estimate_beta1(reversed, 2, r2);
  CHECK(a.exact);  // C(6,2) = 15 <= 200, fully enumerated
  CHECK(a.beta1 == doctest::Approx(b.beta1).epsilon(1e-12));
}

TEST_CASE("estimate_beta1 decreases with batch size") {
  RngStream rng(54, "beta1");
  std::vector<Matrix> grads;
  for (int i = 0; i < 40; ++i) grads.push_back(gaussian_matrix(5, 4, rng));
  double prev = std::numeric_limits<double>::infinity();
  double prev_se = 0.0;
  for (int B : {2, 4, 8, 16}) {
    RngStream mc(55, "mc", static_cast<std::uint64_t>(B));
    NoiseStats s = estimate_beta1(grads, B, mc, 400);
    CHECK(s.beta1 <= prev + 2.0 * (s.se + prev_se));
    prev = s.beta1;
    prev_se = s.se;
  }
}

TEST_CASE("extract_beta recovers zero on pure-drift trajectories") {
  // Drift inversion: a trajectory advanced by exactly the lambda drift
  // inverts to an identically-zero noise series
  const double eta = 1.0, D = 1e-3, dt = 0.01;
  const int m = 8, n = 5, r = 5;
  spectral::DysonState s{{2.0, 1.5, 1.1, 0.8, 0.5}, m, n, 0.0};
  const long T = 50;
  Matrix traj(T, r);
  for (long t = 0; t < T; ++t) {
    for (int k = 0; k < r; ++k) traj(t, k) = s.lambdas[static_cast<std::size_t>(k)];
    Vector d = spectral::lambda_drift(s, Vector(), eta, D);
    for (int k = 0; k < r; ++k) s.lambdas[static_cast<std::size_t>(k)] += d(k) * dt;
  }
  ExtractBetaParams p;
  p.eta = eta;
  p.D = D;
  p.dt = dt;
  p.m = m;
  p.n = n;
  p.convention = BetaConvention::DriftInversion;
  BetaSeries series = extract_beta(traj, Matrix(), p);
  CHECK(series.beta.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("extract_beta force-balance vanishes on its own drift flow") {
  // trajectory advanced by the zero-noise force balance; the
  // central-difference inversion leaves only O(dt^2) residue
  const double eta = 0.25, dt = 1e-4;
  const int r = 3;
  std::vector<double> l = {2.0, 1.2, 0.6};
  const long T = 200;
  Matrix traj(T, r);
  Matrix gf = Matrix::Zero(T, r);
  // d lambda/dt = repulsion with g = 0; integrate with RK4 so the path is
  // exact far beyond the central-difference error being measured
  auto flow = [&](const std::vector<double>& state) {
    std::vector<double> d(static_cast<std::size_t>(r), 0.0);
    for (int k = 0; k < r; ++k) {
      for (int j = 0; j < r; ++j) {
        if (j != k) {
          d[static_cast<std::size_t>(k)] +=
              state[static_cast<std::size_t>(k)] /
              (state[static_cast<std::size_t>(k)] - state[static_cast<std::size_t>(j)]);
        }
      }
    }
    return d;
  };
  for (long t = 0; t < T; ++t) {
    for (int k = 0; k < r; ++k) traj(t, k) = l[static_cast<std::size_t>(k)];
    auto k1 = flow(l);
    std::vector<double> s2 = l, s3 = l, s4 = l;
    for (int k = 0; k < r; ++k) s2[static_cast<std::size_t>(k)] += 0.5 * dt * k1[static_cast<std::size_t>(k)];
    auto k2 = flow(s2);
    for (int k = 0; k < r; ++k) s3[static_cast<std::size_t>(k)] += 0.5 * dt * k2[static_cast<std::size_t>(k)];
    auto k3 = flow(s3);
    for (int k = 0; k < r; ++k) s4[static_cast<std::size_t>(k)] += dt * k3[static_cast<std::size_t>(k)];
    auto k4 = flow(s4);
    for (int k = 0; k < r; ++k) {
      l[static_cast<std::size_t>(k)] +=
          dt / 6.0 *
          (k1[static_cast<std::size_t>(k)] + 2.0 * k2[static_cast<std::size_t>(k)] +
           2.0 * k3[static_cast<std::size_t>(k)] + k4[static_cast<std::size_t>(k)]);
    }
  }
  ExtractBetaParams p;
  p.eta = eta;
  p.dt = dt;
  p.convention = BetaConvention::ForceBalance;
  BetaSeries series = extract_beta(traj, gf, p);
  // interior rows: central differences cancel the drift to second order
  double interior_max = 0.0;
  for (long t = 1; t + 1 < T; ++t) {
    for (int k = 0; k < r; ++k) interior_max = std::max(interior_max, std::abs(series.beta(t, k)));
  }
  const double signal = series.repulsion.cwiseAbs().maxCoeff() / std::sqrt(eta * 0.5);
  CHECK(interior_max < 1e-6 * signal);
}

TEST_CASE("injected gaussian noise round-trips through extract_beta") {
  const double eta = 1.0, D = 2e-3, dt = 0.05;
  const int m = 9, n = 6, r = 4;
  RngStream rng(56, "roundtrip");
  spectral::DysonState s{{3.0, 2.2, 1.5, 0.9}, m, n, 0.0};
  const long T = 80;
  Matrix traj(T, r);
  Matrix injected(T - 1, r);
  for (long t = 0; t < T; ++t) {
    for (int k = 0; k < r; ++k) traj(t, k) = s.lambdas[static_cast<std::size_t>(k)];
    if (t + 1 == T) break;
    Vector d = spectral::lambda_drift(s, Vector(), eta, D);
    for (int k = 0; k < r; ++k) {
      const double dw = std::sqrt(dt) * rng.gaussian();
      injected(t, k) = dw;
      s.lambdas[static_cast<std::size_t>(k)] +=
          d(k) * dt + 2.0 * std::sqrt(2.0 * eta * D * s.lambdas[static_cast<std::size_t>(k)]) * dw;
    }
  }
  ExtractBetaParams p;
  p.eta = eta;
  p.D = D;
  p.dt = dt;
  p.m = m;
  p.n = n;
  p.convention = BetaConvention::DriftInversion;
  BetaSeries series = extract_beta(traj, Matrix(), p);
  for (long t = 0; t + 1 < T; ++t) {
    for (int k = 0; k < r; ++k) {
      CHECK(series.beta(t, k) == doctest::Approx(injected(t, k)).epsilon(1e-9));
    }
  }
}

TEST_CASE("extracted increments from a dyson run look like wiener increments") {
  const double eta = 1.0, D = 1e-3, dt = 0.02;
  const int r = 6, m = 9, n = 6;
  RngStream rng(57, "dyson-x");
  std::vector<double> l0;
  for (int k = 0; k < r; ++k) l0.push_back(1.0 * (r - k));
  spectral::DysonState s0{l0, m, n, 0.0};
  const long steps = 4000;
  Matrix traj(steps + 1, r);
  long idx = 0;
  auto [fin, stats] = spectral::simulate_dyson(
      s0, eta, D, steps, dt, rng,
      [&](const spectral::DysonState& st) {
        for (int k = 0; k < r; ++k) traj(idx, k) = st.lambdas[static_cast<std::size_t>(k)];
        ++idx;
      });
  REQUIRE(stats.bisection_events == 0);  // exact inversion needs plain steps
  ExtractBetaParams p;
  p.eta = eta;
  p.D = D;
  p.dt = dt;
  p.m = m;
  p.n = n;
  p.convention = BetaConvention::DriftInversion;
  BetaSeries series = extract_beta(traj, Matrix(), p);
  const double mean = series.beta.mean();
  const double var =
      (series.beta.array() - mean).square().sum() / static_cast<double>(series.beta.size() - 1);
  const double se = std::sqrt(var / static_cast<double>(series.beta.size()));
  CHECK(std::abs(mean) < 3.0 * se);
  CHECK(var == doctest::Approx(dt).epsilon(0.10));
}

TEST_CASE("extract_beta rejects degenerate trajectories") {
  Matrix traj(3, 2);
  traj << 2.0, 1.0, 2.0, 2.0, 2.0, 1.0;  // middle row has a zero gap
  ExtractBetaParams p;
  CHECK_THROWS_AS(extract_beta(traj, Matrix(), p), DegeneracyError);
  Matrix neg(2, 1);
  neg << 1.0, -1.0;
  CHECK_THROWS_AS(extract_beta(neg, Matrix(), p), DomainError);
}

TEST_CASE("noise correlation report on white noise and duplicated series") {
  RngStream rng(58, "corr");
  const long T = 400;
  BetaSeries series;
  series.beta.resize(T, 1);
  series.dlambda_dt.resize(T, 1);
  series.grad_force.resize(T, 1);
  series.repulsion.resize(T, 1);
  for (long t = 0; t < T; ++t) {
    series.beta(t, 0) = rng.gaussian();
    series.dlambda_dt(t, 0) = rng.gaussian();
    series.grad_force(t, 0) = rng.gaussian();
    series.repulsion(t, 0) = rng.gaussian();
  }
  CorrelationReport rep = noise_correlation_report(series);
  CHECK_FALSE(rep.undefined_correlation);
  CHECK(std::abs(rep.repulsion_vs_dlambda) < 6.0 / std::sqrt(static_cast<double>(T)));
  CHECK(std::abs(rep.repulsion_vs_gradforce) < 6.0 / std::sqrt(static_cast<double>(T)));
  CHECK(rep.share_dlambda + rep.share_gradforce + rep.share_repulsion ==
        doctest::Approx(1.0).epsilon(1e-12));

  series.dlambda_dt = series.repulsion;
  CorrelationReport dup = noise_correlation_report(series);
  CHECK(dup.repulsion_vs_dlambda == doctest::Approx(1.0).epsilon(1e-12));

  series.repulsion.setConstant(2.0);
  CorrelationReport flat = noise_correlation_report(series);
  CHECK(flat.undefined_correlation);

  BetaSeries tiny = series;
  tiny.beta.resize(10, 1);
  tiny.dlambda_dt.resize(10, 1);
  tiny.grad_force.resize(10, 1);
  tiny.repulsion.resize(10, 1);
  CHECK_THROWS_AS(noise_correlation_report(tiny), DomainError);
}

TEST_SUITE_END();
