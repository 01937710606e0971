#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "ssde/detail/tw1_table.hpp"
#include "ssde/error.hpp"
#include "ssde/interp.hpp"
#include "ssde/quadrature.hpp"

namespace ssde::rmt {

// Closed-form random-matrix baselines. Spectra are handled in normalized
// units throughout: for an m x n matrix W with i.i.d. entries of variance v,
// the samples are lambda_k / max(m, n) where lambda_k are the squared
// singular values. In those units the bulk follows the Marchenko-Pastur law
// with aspect gamma = min(m,n)/max(m,n) and scale v.

struct MPParams {
  double gamma;         // aspect ratio in (0, 1]
  double scale;         // per-entry variance
  double lambda_minus;  // lower support edge, scale*(1-sqrt(gamma))^2
  double lambda_plus;   // upper support edge, scale*(1+sqrt(gamma))^2
};

inline std::pair<double, double> mp_support(double gamma, double scale) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw DomainError("mp_support: gamma must be in (0,1] (transpose so rows >= cols)");
  }
  if (!(scale > 0.0)) throw DomainError("mp_support: scale must be positive");
  const double sg = std::sqrt(gamma);
  return {scale * (1.0 - sg) * (1.0 - sg), scale * (1.0 + sg) * (1.0 + sg)};
}

inline MPParams mp_params(double gamma, double scale) {
  auto [lo, hi] = mp_support(gamma, scale);
  return MPParams{gamma, scale, lo, hi};
}

// Density of the MP bulk; zero outside the support, and zero by convention at
// x = 0 when the lower edge touches zero (gamma = 1).
inline double mp_density(double x, const MPParams& p) {
  // the closed edges carry no mass; x = 0 at gamma = 1 is the
  // singular-in-form point defined to zero
  if (x <= p.lambda_minus || x >= p.lambda_plus) return 0.0;
  const double num = std::sqrt((p.lambda_plus - x) * (x - p.lambda_minus));
  return num / (2.0 * M_PI * p.gamma * p.scale * x);
}

// CDF via the substitution x = c + r*sin(t), which removes both square-root
// edge singularities (and the 1/x pole at gamma = 1 cancels in the limit).
inline double mp_cdf(double x, const MPParams& p) {
  if (x <= p.lambda_minus) return 0.0;
  if (x >= p.lambda_plus) return 1.0;
  const double c = 0.5 * (p.lambda_plus + p.lambda_minus);
  const double r = 0.5 * (p.lambda_plus - p.lambda_minus);
  const double t_hi = std::asin(std::clamp((x - c) / r, -1.0, 1.0));
  auto integrand = [&](double t) {
    const double xt = c + r * std::sin(t);
    if (xt <= 0.0) return 0.0;
    const double cost = std::cos(t);
    return r * r * cost * cost / (2.0 * M_PI * p.gamma * p.scale * xt);
  };
  double val = gauss_legendre(integrand, -0.5 * M_PI, t_hi);
  return std::clamp(val, 0.0, 1.0);
}

struct EdgeScaling {
  double mu;     // centering: lambda_plus
  double sigma;  // scale of edge fluctuations, O(N^{-2/3})
  int m;
  int n;
};

// Asymptotic edge constants for an m x n matrix (m >= n) in normalized
// spectral units. The N^{-2/3} rate is carried by the larger dimension,
// which plays the role of the sample count.
inline EdgeScaling edge_scaling(int m, int n, double scale) {
  if (m < n || n < 1) throw DomainError("edge_scaling: need m >= n >= 1");
  if (!(scale > 0.0)) throw DomainError("edge_scaling: scale must be positive");
  const double gamma = static_cast<double>(n) / static_cast<double>(m);
  const double sg = std::sqrt(gamma);
  const double mu = scale * (1.0 + sg) * (1.0 + sg);
  const double sigma = scale * (1.0 + sg) * std::cbrt(1.0 + 1.0 / sg) /
                       std::pow(static_cast<double>(m), 2.0 / 3.0);
  return EdgeScaling{mu, sigma, m, n};
}

// Tracy-Widom F1 from the precomputed table (see tools/tw1_table_gen) with
// monotone cubic interpolation; clamps to the endpoint values outside
// [-10, 8]. Immutable after first use, safe to share across threads.
inline double tw1_cdf(double s) {
  static const MonotoneCubic interp = [] {
    std::vector<double> xs(detail::kTw1TableSize), ys(detail::kTw1TableSize);
    for (int i = 0; i < detail::kTw1TableSize; ++i) {
      xs[static_cast<std::size_t>(i)] =
          detail::kTw1SMin +
          (detail::kTw1SMax - detail::kTw1SMin) * i / (detail::kTw1TableSize - 1);
      ys[static_cast<std::size_t>(i)] = detail::kTw1Cdf[i];
    }
    return MonotoneCubic(std::move(xs), std::move(ys));
  }();
  return interp(s);
}

struct EmpiricalSpectrum {
  // nonincreasing, finite, nonnegative
  std::vector<double> values;

  explicit EmpiricalSpectrum(std::vector<double> vals) : values(std::move(vals)) {
    for (double v : values) {
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError("EmpiricalSpectrum: values must be finite and >= 0");
      }
    }
    std::sort(values.begin(), values.end(), std::greater<double>());
  }

  std::size_t count() const { return values.size(); }
};

// sup-norm distance between the empirical CDF of the spectrum and a
// reference CDF
inline double ks_distance(const EmpiricalSpectrum& spectrum,
                          const std::function<double(double)>& cdf) {
  if (spectrum.values.empty()) throw DomainError("ks_distance: empty spectrum");
  std::vector<double> sorted(spectrum.values.rbegin(), spectrum.values.rend());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

// number of spectrum values beyond mu + threshold*sigma
inline int tail_count_beyond_edge(const EmpiricalSpectrum& spectrum, const EdgeScaling& edge,
                                  double threshold) {
  if (spectrum.values.empty()) throw DomainError("tail_count_beyond_edge: empty spectrum");
  int count = 0;
  for (double v : spectrum.values) {
    if ((v - edge.mu) / edge.sigma > threshold) ++count;
  }
  return count;
}

}  // namespace ssde::rmt
