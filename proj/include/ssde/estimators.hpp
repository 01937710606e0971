#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ssde/error.hpp"
#include "ssde/matrix.hpp"
#include "ssde/rng.hpp"
#include "ssde/spectrum.hpp"

namespace ssde::estimators {

// Empirical estimation of the theory's constants: the diffusion scale D from
// spectral spread, the minibatch noise beta_1, and per-mode stochastic-term
// extraction for the repulsion-correlation analysis.

// (sigma_max - sigma_med)^2 / t_b from the final snapshot. An
// order-of-magnitude estimator by construction; invariant under adding a
// common shift to every singular value.
inline double estimate_diffusion(const std::vector<SpectrumSnapshot>& snapshots, double t_b) {
  if (snapshots.empty()) throw DomainError("estimate_diffusion: no snapshots");
  if (!(t_b > 0.0)) throw DomainError("estimate_diffusion: t_b must be positive");
  const auto& values = snapshots.back().values;
  if (values.empty()) throw DomainError("estimate_diffusion: empty snapshot");
  const double smax = values.front();
  const std::size_t n = values.size();
  const double smed = (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return (smax - smed) * (smax - smed) / t_b;
}

struct NoiseStats {
  double beta1 = 0.0;  // E || grad_S - grad ||_F^2 over minibatches
  double se = 0.0;     // standard error (0 when fully enumerated)
  long sample_count = 0;
  int batch_size = 0;
  bool exact = false;  // true when all C(N, B) minibatches were enumerated
};

namespace detail {

// C(n, k) capped at `cap` to avoid overflow
inline long long choose_capped(int n, int k, long long cap) {
  long long result = 1;
  k = std::min(k, n - k);
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > cap) return cap + 1;
  }
  return result;
}

}  // namespace detail

// Monte-Carlo (or exhaustive, when feasible) estimate of the minibatch
// gradient variance E || grad_{S} - grad ||^2 with minibatches of size B
// sampled without replacement.
inline NoiseStats estimate_beta1(const std::vector<Matrix>& per_example_grads, int B,
                                 RngStream& rng, int mc_minibatches = 200) {
  const int N = static_cast<int>(per_example_grads.size());
  if (N < 2) throw DomainError("estimate_beta1: need at least two example gradients");
  if (B < 1 || B > N) throw DomainError("estimate_beta1: batch size out of range");
  Matrix mean = per_example_grads[0];
  for (int i = 1; i < N; ++i) mean += per_example_grads[static_cast<std::size_t>(i)];
  mean /= static_cast<double>(N);

  auto subset_value = [&](const std::vector<int>& idx) {
    Matrix g = Matrix::Zero(mean.rows(), mean.cols());
    for (int i : idx) g += per_example_grads[static_cast<std::size_t>(i)];
    g /= static_cast<double>(B);
    return (g - mean).squaredNorm();
  };

  std::vector<double> values;
  const long long total = detail::choose_capped(N, B, mc_minibatches);
  NoiseStats out;
  out.batch_size = B;
  if (total <= mc_minibatches) {
    // enumerate every minibatch
    std::vector<int> idx(static_cast<std::size_t>(B));
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      values.push_back(subset_value(idx));
      int pos = B - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == N - B + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (int j = pos + 1; j < B; ++j) {
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
    out.exact = true;
  } else {
    std::vector<int> pool(static_cast<std::size_t>(N));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> idx(static_cast<std::size_t>(B));
    for (int s = 0; s < mc_minibatches; ++s) {
      // partial Fisher-Yates for a without-replacement draw
      for (int j = 0; j < B; ++j) {
        int pick = j + static_cast<int>(rng.uniform() * (N - j));
        pick = std::min(pick, N - 1);
        std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick)]);
        idx[static_cast<std::size_t>(j)] = pool[static_cast<std::size_t>(j)];
      }
      values.push_back(subset_value(idx));
    }
  }

  double sum = 0.0;
  for (double v : values) sum += v;
  out.beta1 = sum / static_cast<double>(values.size());
  out.sample_count = static_cast<long>(values.size());
  if (!out.exact && values.size() > 1) {
    double var = 0.0;
    for (double v : values) var += (v - out.beta1) * (v - out.beta1);
    var /= static_cast<double>(values.size() - 1);
    out.se = std::sqrt(var / static_cast<double>(values.size()));
  }
  return out;
}

// ---- per-mode stochastic term ----

enum class BetaConvention {
  // reads the noise term off the per-mode force balance
  //   d lambda_k/dt = -sqrt(eta) lambda_k g_k + sum_{j != k} lambda_k/(lambda_k - lambda_j)
  //                   + sqrt(eta lambda_k) beta_k,
  // with the matrix-valued loss gradient entering as the projected scalar
  // g_k = u_k^T (grad L) v_k
  ForceBalance,
  // exact inversion of the lambda update: beta_k = (d lambda_k - drift dt)
  // / (2 sqrt(2 eta D lambda_k)); recovers Wiener increments
  DriftInversion,
};

struct ExtractBetaParams {
  double eta = 1.0;
  double D = 0.0;   // DriftInversion only
  double dt = 1.0;
  int m = 0;        // DriftInversion only
  int n = 0;
  BetaConvention convention = BetaConvention::ForceBalance;
};

// Extracted stochastic terms plus the three force-component series used by
// the correlation analysis. Rows are steps, columns are modes.
struct BetaSeries {
  Matrix beta;
  Matrix dlambda_dt;
  Matrix grad_force;
  Matrix repulsion;
  BetaConvention convention = BetaConvention::ForceBalance;

  long steps() const { return beta.rows(); }
  int modes() const { return static_cast<int>(beta.cols()); }
};

namespace detail {

inline void check_lambda_row(const Matrix& traj, long t) {
  const int r = static_cast<int>(traj.cols());
  double lmax = 0.0;
  for (int k = 0; k < r; ++k) lmax = std::max(lmax, traj(t, k));
  for (int k = 0; k < r; ++k) {
    if (!(traj(t, k) > 1e-300)) throw DomainError("extract_beta: lambda must stay positive");
    for (int j = k + 1; j < r; ++j) {
      if (std::abs(traj(t, k) - traj(t, j)) < 1e-12 * std::max(lmax, 1e-300)) {
        throw DegeneracyError("extract_beta: lambda gap below tolerance", k,
                              std::abs(traj(t, k) - traj(t, j)));
      }
    }
  }
}

inline double repulsion_sum(const Matrix& traj, long t, int k) {
  double acc = 0.0;
  for (int j = 0; j < traj.cols(); ++j) {
    if (j == k) continue;
    acc += traj(t, k) / (traj(t, k) - traj(t, j));
  }
  return acc;
}

}  // namespace detail

inline BetaSeries extract_beta(const Matrix& lambda_traj, const Matrix& grad_force,
                               const ExtractBetaParams& p) {
  const long T = lambda_traj.rows();
  const int r = static_cast<int>(lambda_traj.cols());
  if (T < 2 || r < 1) throw DomainError("extract_beta: need at least two steps");
  if (grad_force.size() != 0 && (grad_force.rows() != T || grad_force.cols() != r)) {
    throw DomainError("extract_beta: grad_force shape mismatch");
  }
  if (!(p.eta > 0.0)) throw DomainError("extract_beta: eta must be positive");
  if (!(p.dt > 0.0)) throw DomainError("extract_beta: dt must be positive");
  for (long t = 0; t < T; ++t) detail::check_lambda_row(lambda_traj, t);

  auto g = [&](long t, int k) { return grad_force.size() ? grad_force(t, k) : 0.0; };

  BetaSeries out;
  out.convention = p.convention;
  if (p.convention == BetaConvention::ForceBalance) {
    out.beta.resize(T, r);
    out.dlambda_dt.resize(T, r);
    out.grad_force.resize(T, r);
    out.repulsion.resize(T, r);
    for (long t = 0; t < T; ++t) {
      for (int k = 0; k < r; ++k) {
        double dldt;
        if (t == 0) {
          dldt = (lambda_traj(1, k) - lambda_traj(0, k)) / p.dt;
        } else if (t == T - 1) {
          dldt = (lambda_traj(T - 1, k) - lambda_traj(T - 2, k)) / p.dt;
        } else {
          dldt = (lambda_traj(t + 1, k) - lambda_traj(t - 1, k)) / (2.0 * p.dt);
        }
        const double lk = lambda_traj(t, k);
        const double gf = std::sqrt(p.eta) * lk * g(t, k);
        const double rep = detail::repulsion_sum(lambda_traj, t, k);
        out.dlambda_dt(t, k) = dldt;
        out.grad_force(t, k) = gf;
        out.repulsion(t, k) = rep;
        out.beta(t, k) = (dldt + gf - rep) / std::sqrt(p.eta * lk);
      }
    }
    return out;
  }

  if (!(p.D > 0.0)) throw DomainError("extract_beta: DriftInversion needs D > 0");
  if (p.m < p.n || p.n < 1) throw DomainError("extract_beta: DriftInversion needs m >= n >= 1");
  out.beta.resize(T - 1, r);
  out.dlambda_dt.resize(T - 1, r);
  out.grad_force.resize(T - 1, r);
  out.repulsion.resize(T - 1, r);
  for (long t = 0; t + 1 < T; ++t) {
    for (int k = 0; k < r; ++k) {
      const double lk = lambda_traj(t, k);
      const double gf = -2.0 * std::sqrt(lk) * p.eta * g(t, k);
      const double rep = 2.0 * p.eta * p.D * detail::repulsion_sum(lambda_traj, t, k);
      const double drift = gf + p.eta * p.D * (p.m - p.n + 3) + rep;
      const double dl = lambda_traj(t + 1, k) - lambda_traj(t, k);
      out.dlambda_dt(t, k) = dl / p.dt;
      out.grad_force(t, k) = gf;
      out.repulsion(t, k) = rep;
      out.beta(t, k) = (dl - drift * p.dt) / (2.0 * std::sqrt(2.0 * p.eta * p.D * lk));
    }
  }
  return out;
}

struct CorrelationReport {
  double repulsion_vs_dlambda = 0.0;
  double repulsion_vs_gradforce = 0.0;
  double share_dlambda = 0.0;  // mean-|force| shares; the three sum to 1
  double share_gradforce = 0.0;
  double share_repulsion = 0.0;
  bool undefined_correlation = false;  // some series was constant
  long steps = 0;
};

namespace detail {

inline double pearson(const Matrix& a, const Matrix& b, bool& undefined) {
  const double n = static_cast<double>(a.size());
  const double ma = a.mean(), mb = b.mean();
  double sa = 0.0, sb = 0.0, sab = 0.0;
  for (long i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      const double da = a(i, j) - ma, db = b(i, j) - mb;
      sa += da * da;
      sb += db * db;
      sab += da * db;
    }
  }
  if (sa <= 0.0 || sb <= 0.0) {
    undefined = true;
    return std::numeric_limits<double>::quiet_NaN();
  }
  (void)n;
  return sab / std::sqrt(sa * sb);
}

}  // namespace detail

// Pearson correlations of the repulsion force against the other force
// components, plus mean-magnitude shares.
inline CorrelationReport noise_correlation_report(const BetaSeries& series) {
  if (series.steps() < 30) throw DomainError("noise_correlation_report: need >= 30 steps");
  CorrelationReport rep;
  rep.steps = series.steps();
  rep.repulsion_vs_dlambda =
      detail::pearson(series.repulsion, series.dlambda_dt, rep.undefined_correlation);
  rep.repulsion_vs_gradforce =
      detail::pearson(series.repulsion, series.grad_force, rep.undefined_correlation);
  const double md = series.dlambda_dt.cwiseAbs().mean();
  const double mg = series.grad_force.cwiseAbs().mean();
  const double mr = series.repulsion.cwiseAbs().mean();
  const double total = md + mg + mr;
  if (total > 0.0) {
    rep.share_dlambda = md / total;
    rep.share_gradforce = mg / total;
    rep.share_repulsion = mr / total;
  }
  return rep;
}

}  // namespace ssde::estimators
