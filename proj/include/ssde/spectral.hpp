#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ssde/error.hpp"
#include "ssde/matrix.hpp"
#include "ssde/rmt.hpp"
#include "ssde/rng.hpp"
#include "ssde/special.hpp"

namespace ssde::spectral {

// Drift/diffusion laws of singular values under isotropic SGD noise, the
// interacting-particle dynamics of the squared singular values, and the
// gamma-type stationary law with its fitting machinery.

inline constexpr double kLambdaFloor = 1e-12;  // reflection floor keeps sqrt(lambda) real
inline constexpr double kGapFloorRel = 1e-10;  // of lambda_1; discrete collisions get bisected
inline constexpr int kMaxBisections = 20;

// Strictly ordered squared singular values evolving as interacting particles.
struct DysonState {
  std::vector<double> lambdas;  // lambda_1 > ... > lambda_r > 0
  int m = 0;                    // matrix shape context, m >= n
  int n = 0;
  double time = 0.0;

  int r() const { return static_cast<int>(lambdas.size()); }
};

inline void validate_dyson(const DysonState& s) {
  if (s.lambdas.empty()) throw DomainError("DysonState: empty");
  if (s.m < s.n || s.n < 1) throw DomainError("DysonState: need m >= n >= 1");
  if (s.r() > s.n) throw DomainError("DysonState: more particles than matrix rank");
  const double gap_floor = kGapFloorRel * s.lambdas.front();
  for (int k = 0; k < s.r(); ++k) {
    if (!(s.lambdas[static_cast<std::size_t>(k)] >= kLambdaFloor)) {
      throw DomainError("DysonState: lambda below positivity floor");
    }
    if (k > 0) {
      const double gap =
          s.lambdas[static_cast<std::size_t>(k - 1)] - s.lambdas[static_cast<std::size_t>(k)];
      if (!(gap >= gap_floor)) throw DomainError("DysonState: ordering/gap violated");
    }
  }
}

// Drift of sigma_k under isotropic diffusion:
//   -eta * g + eta * D * [ (m-n+1)/(2 sigma_k) + sum_{j != k} sigma_k/(sigma_k^2 - sigma_j^2) ]
// where g is the projected gradient u_k^T (grad L) v_k, supplied by the
// caller; this module never differentiates a loss itself.
inline double sigma_drift(const Vector& sigmas, int k, double grad_proj, double eta, double D,
                          int m, int n, double gap_tol_rel = 1e-12) {
  if (k < 0 || k >= sigmas.size()) throw DomainError("sigma_drift: index out of range");
  if (!(sigmas(k) > 0.0)) throw DomainError("sigma_drift: sigma_k must be positive");
  if (m < n) throw DomainError("sigma_drift: need m >= n");
  const double lambda_scale = sigmas.maxCoeff() * sigmas.maxCoeff();
  double repulsion = 0.0;
  for (Eigen::Index j = 0; j < sigmas.size(); ++j) {
    if (j == k) continue;
    const double dl = sigmas(k) * sigmas(k) - sigmas(j) * sigmas(j);
    if (std::abs(dl) < gap_tol_rel * std::max(lambda_scale, 1e-300)) {
      throw DegeneracyError("sigma_drift: squared-gap below tolerance", k, std::abs(dl));
    }
    repulsion += sigmas(k) / dl;
  }
  return -eta * grad_proj +
         eta * D * ((m - n + 1) / (2.0 * sigmas(k)) + repulsion);
}

// Drift of the squared singular values:
//   -2 sqrt(lambda_k) eta g_k + eta D (m-n+3) + 2 eta D sum_{j != k} lambda_k/(lambda_k-lambda_j)
inline Vector lambda_drift(const DysonState& state, const Vector& grad_projs, double eta, double D,
                           double gap_tol_rel = 1e-12) {
  validate_dyson(state);
  if (grad_projs.size() != 0 && grad_projs.size() != state.r()) {
    throw DomainError("lambda_drift: grad_projs size mismatch");
  }
  const int r = state.r();
  const double scale = state.lambdas.front();
  Vector drift(r);
  for (int k = 0; k < r; ++k) {
    const double lk = state.lambdas[static_cast<std::size_t>(k)];
    double repulsion = 0.0;
    for (int j = 0; j < r; ++j) {
      if (j == k) continue;
      const double dl = lk - state.lambdas[static_cast<std::size_t>(j)];
      if (std::abs(dl) < gap_tol_rel * std::max(scale, 1e-300)) {
        throw DegeneracyError("lambda_drift: gap below tolerance", k, std::abs(dl));
      }
      repulsion += lk / dl;
    }
    const double g = grad_projs.size() ? grad_projs(k) : 0.0;
    drift(k) = -2.0 * std::sqrt(lk) * eta * g + eta * D * (state.m - state.n + 3) +
               2.0 * eta * D * repulsion;
  }
  return drift;
}

struct DysonRunStats {
  long steps = 0;
  long bisection_events = 0;    // proposals that had to be split
  long rejected_proposals = 0;  // total rejected proposals across depths
  long reflections = 0;
  int max_depth = 0;

  double engagement_rate() const {
    return steps > 0 ? static_cast<double>(bisection_events) / static_cast<double>(steps) : 0.0;
  }
};

struct DysonOptions {
  double beta1 = 0.0;  // optional mean-field restoring force -beta1 * lambda
  double lambda_floor = kLambdaFloor;
  double gap_floor_rel = kGapFloorRel;
  int max_bisections = kMaxBisections;
};

using DysonRecorder = std::function<void(const DysonState&)>;

namespace detail {

inline bool dyson_proposal_ok(const std::vector<double>& l, double gap_floor_rel,
                              double lambda_floor) {
  const double gap_floor = gap_floor_rel * l.front();
  for (std::size_t k = 0; k < l.size(); ++k) {
    if (!(l[k] >= lambda_floor)) return false;
    if (k > 0 && !(l[k - 1] - l[k] >= gap_floor)) return false;
  }
  return true;
}

inline std::vector<double> dyson_advance(const DysonState& state, double eta, double D, double dt,
                                         RngStream& rng, const DysonOptions& opt,
                                         DysonRunStats& stats, int depth) {
  stats.max_depth = std::max(stats.max_depth, depth);
  const Vector drift = lambda_drift(state, Vector(), eta, D, opt.gap_floor_rel * 1e-2);
  const int r = state.r();
  std::vector<double> prop(static_cast<std::size_t>(r));
  const double sqdt = std::sqrt(dt);
  bool reflected = false;
  for (int k = 0; k < r; ++k) {
    const double lk = state.lambdas[static_cast<std::size_t>(k)];
    const double diffusion = 2.0 * std::sqrt(2.0 * eta * D * std::max(lk, opt.lambda_floor));
    double next = lk + (drift(k) - opt.beta1 * lk) * dt + diffusion * sqdt * rng.gaussian();
    if (next < opt.lambda_floor) {
      next = 2.0 * opt.lambda_floor - next;
      reflected = true;
    }
    prop[static_cast<std::size_t>(k)] = next;
  }
  if (dyson_proposal_ok(prop, opt.gap_floor_rel, opt.lambda_floor)) {
    if (reflected) ++stats.reflections;
    return prop;
  }
  ++stats.rejected_proposals;
  if (depth >= opt.max_bisections) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "dyson step failed after %d bisections (r=%d, t=%.6g, dt=%.3g, lambda_1=%.6g)",
                  depth, r, state.time, dt, state.lambdas.front());
    throw IntegrationError(buf);
  }
  DysonState half = state;
  half.lambdas = dyson_advance(state, eta, D, 0.5 * dt, rng, opt, stats, depth + 1);
  half.time = state.time + 0.5 * dt;
  return dyson_advance(half, eta, D, 0.5 * dt, rng, opt, stats, depth + 1);
}

}  // namespace detail

// Euler-Maruyama on the interacting-particle SDE with reflection at the
// positivity floor. A proposal that would reorder particles or close a gap
// below the floor is retried as two half steps (recursively, up to
// max_bisections); engagements are counted in the returned stats.
inline std::pair<DysonState, DysonRunStats> simulate_dyson(
    DysonState state, double eta, double D, long steps, double dt, RngStream& rng,
    const DysonRecorder& recorder = nullptr, long record_stride = 1,
    const DysonOptions& opt = DysonOptions{}) {
  validate_dyson(state);
  if (steps < 0) throw DomainError("simulate_dyson: steps must be >= 0");
  if (!(dt > 0.0)) throw DomainError("simulate_dyson: dt must be positive");
  if (record_stride < 1) record_stride = 1;
  DysonRunStats stats;
  if (recorder) recorder(state);
  for (long i = 0; i < steps; ++i) {
    const long rejected_before = stats.rejected_proposals;
    state.lambdas = detail::dyson_advance(state, eta, D, dt, rng, opt, stats, 0);
    state.time += dt;
    ++stats.steps;
    if (stats.rejected_proposals > rejected_before) ++stats.bisection_events;
    if (recorder && ((i + 1) % record_stride == 0 || i + 1 == steps)) recorder(state);
  }
  return {std::move(state), stats};
}

// ---- stationary law ----

// Parameters of the gamma-type stationary density. The shape is fixed by the
// matrix dimensions alone: alpha0/(4 eta D) = (m-n+3)/4.
struct StationaryParams {
  double eta;
  double D;
  double beta1;
  int m;
  int n;

  double alpha0() const { return eta * D * (m - n + 3); }
  double shape() const { return 0.25 * (m - n + 3); }
  double rate() const { return beta1 / (4.0 * eta * D); }
};

inline void validate_stationary(const StationaryParams& p) {
  if (!(p.eta > 0.0 && p.D > 0.0 && p.beta1 > 0.0)) {
    throw DomainError("StationaryParams: eta, D, beta1 must be positive");
  }
  if (p.m < p.n) throw DomainError("StationaryParams: need m >= n");
}

// gamma density with shape (m-n+3)/4 and rate beta1/(4 eta D)
inline double stationary_lambda_pdf(double lambda, const StationaryParams& p) {
  validate_stationary(p);
  if (!(lambda > 0.0)) throw DomainError("stationary_lambda_pdf: lambda must be positive");
  const double a = p.shape(), b = p.rate();
  return std::exp(a * std::log(b) + (a - 1.0) * std::log(lambda) - b * lambda - std::lgamma(a));
}

// pushforward to sigma = sqrt(lambda):
//   2 (rate)^{(m-n+3)/4} / Gamma((m-n+3)/4) * sigma^{(m-n+1)/2} * exp(-rate sigma^2)
inline double stationary_sigma_pdf(double sigma, const StationaryParams& p) {
  validate_stationary(p);
  if (!(sigma > 0.0)) throw DomainError("stationary_sigma_pdf: sigma must be positive");
  const double a = p.shape(), b = p.rate();
  return 2.0 * std::exp(a * std::log(b) + 0.5 * (p.m - p.n + 1) * std::log(sigma) -
                        b * sigma * sigma - std::lgamma(a));
}

// power exponent of the stationary density at large r: (m-n+3)/4 - 1
inline double stationary_exponent(int m, int n) {
  if (m < n) throw DomainError("stationary_exponent: need m >= n");
  return 0.25 * (m - n + 3) - 1.0;
}

// ---- sampling the one-particle stationary SDE ----

enum class StationaryScheme {
  ExactTransition,  // the SDE is a CIR process; transitions are noncentral chi-square
  EulerMaruyama,    // reflected Euler, for cross-checks
};

struct StationarySimOptions {
  StationaryScheme scheme = StationaryScheme::ExactTransition;
  double sample_spacing = 0.0;  // time between retained samples; 0 -> 3/beta1
  double burn_in = 0.0;         // time discarded up front; 0 -> 20/beta1
  double dt = 0.0;              // Euler step; 0 -> 0.01/beta1
};

inline std::vector<double> simulate_stationary_lambda(const StationaryParams& p, int count,
                                                      RngStream& rng,
                                                      StationarySimOptions opt = {}) {
  validate_stationary(p);
  if (count < 1) throw DomainError("simulate_stationary_lambda: count must be >= 1");
  if (opt.sample_spacing <= 0.0) opt.sample_spacing = 3.0 / p.beta1;
  if (opt.burn_in <= 0.0) opt.burn_in = 20.0 / p.beta1;
  if (opt.dt <= 0.0) opt.dt = 0.01 / p.beta1;

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  double lambda = p.alpha0() / p.beta1;  // start at the stationary mean

  if (opt.scheme == StationaryScheme::ExactTransition) {
    const double kappa = p.beta1;
    const double sigma2 = 8.0 * p.eta * p.D;
    const double dof = 0.5 * (p.m - p.n + 3);
    auto transition = [&](double x, double dt_step) {
      const double decay = std::exp(-kappa * dt_step);
      const double c = sigma2 * (1.0 - decay) / (4.0 * kappa);
      const double noncentrality = x * decay / c;
      const int k = rng.poisson(0.5 * noncentrality);
      return c * 2.0 * rng.gamma(0.5 * dof + k);
    };
    lambda = transition(lambda, opt.burn_in);
    for (int i = 0; i < count; ++i) {
      lambda = transition(lambda, opt.sample_spacing);
      out.push_back(lambda);
    }
    return out;
  }

  const long burn_steps = static_cast<long>(std::ceil(opt.burn_in / opt.dt));
  const long spacing_steps = std::max<long>(1, static_cast<long>(opt.sample_spacing / opt.dt));
  const double sqdt = std::sqrt(opt.dt);
  auto euler_step = [&](double x) {
    double next = x + (p.alpha0() - p.beta1 * x) * opt.dt +
                  std::sqrt(8.0 * p.eta * p.D * std::max(x, kLambdaFloor)) * sqdt * rng.gaussian();
    if (next < kLambdaFloor) next = 2.0 * kLambdaFloor - next;
    return next;
  };
  for (long i = 0; i < burn_steps; ++i) lambda = euler_step(lambda);
  while (static_cast<int>(out.size()) < count) {
    for (long i = 0; i < spacing_steps; ++i) lambda = euler_step(lambda);
    out.push_back(lambda);
  }
  return out;
}

// ---- gamma fitting ----

struct GammaFitResult {
  double shape = 0.0;
  double rate = 0.0;
  double implied_beta1 = 0.0;     // 4 eta D * rate
  double gof = 0.0;               // KS distance to the fitted gamma
  long sample_count = 0;
  double theoretical_shape = 0.0; // (m-n+3)/4
};

// Maximum-likelihood gamma fit (Newton on the shape equation, method-of-
// moments start).
inline GammaFitResult fit_stationary(const std::vector<double>& samples, int m, int n, double eta,
                                     double D) {
  if (samples.size() < 30) throw DomainError("fit_stationary: need at least 30 samples");
  if (m < n) throw DomainError("fit_stationary: need m >= n");
  if (!(eta > 0.0 && D > 0.0)) throw DomainError("fit_stationary: eta, D must be positive");
  double mean = 0.0, mean_log = 0.0;
  for (double s : samples) {
    if (!(s > 0.0)) throw DomainError("fit_stationary: samples must be positive");
    mean += s;
    mean_log += std::log(s);
  }
  const double cnt = static_cast<double>(samples.size());
  mean /= cnt;
  mean_log /= cnt;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= (cnt - 1.0);

  const double mom_shape = var > 0.0 ? mean * mean / var : std::numeric_limits<double>::infinity();
  const double mom_rate = var > 0.0 ? mean / var : std::numeric_limits<double>::infinity();
  if (!(var > 1e-15 * mean * mean)) {
    throw FitError("fit_stationary: zero-variance samples", mom_shape, mom_rate);
  }

  // log(shape) - digamma(shape) = log(mean) - mean(log)
  const double c = std::log(mean) - mean_log;
  if (!(c > 0.0)) {
    throw FitError("fit_stationary: degenerate log-moment gap", mom_shape, mom_rate);
  }
  double shape = std::max(mom_shape, 1e-3);
  bool converged = false;
  for (int it = 0; it < 60; ++it) {
    const double f = std::log(shape) - digamma(shape) - c;
    const double fp = 1.0 / shape - trigamma(shape);
    double next = shape - f / fp;
    if (!(next > 0.0)) next = 0.5 * shape;
    if (std::abs(next - shape) <= 1e-12 * shape) {
      shape = next;
      converged = true;
      break;
    }
    shape = next;
  }
  if (!converged) {
    throw FitError("fit_stationary: Newton did not converge", mom_shape, mom_rate);
  }
  const double rate = shape / mean;

  GammaFitResult out;
  out.shape = shape;
  out.rate = rate;
  out.implied_beta1 = 4.0 * eta * D * rate;
  out.sample_count = static_cast<long>(samples.size());
  out.theoretical_shape = 0.25 * (m - n + 3);
  out.gof = rmt::ks_distance(rmt::EmpiricalSpectrum(samples),
                             [&](double x) { return gamma_p(shape, rate * x); });
  return out;
}

// ---- Hilbert transform of power-law densities ----

// Principal value of (1/pi) * int_0^R C x^alpha / (x - lambda) dx by
// symmetric excision with Richardson extrapolation in the excision radius.
inline double hilbert_power_law(double alpha, double C, double lambda, double R) {
  if (!(lambda > 0.0 && lambda < R)) throw DomainError("hilbert_power_law: need 0 < lambda < R");
  if (std::abs(alpha - std::round(alpha)) < 1e-12) {
    throw DomainError("hilbert_power_law: alpha must not be an integer");
  }
  if (alpha <= -1.0) throw DomainError("hilbert_power_law: alpha must exceed -1");
  auto f = [&](double x) { return std::pow(x, alpha) / (x - lambda); };
  const double tol = 1e-11 * std::max(1.0, std::pow(R, std::max(alpha, 0.0)));
  // for alpha < 0 the integrand blows up at 0; peel off an analytic head
  double head_end = 0.0, head_value = 0.0;
  if (alpha < 0.0) {
    head_end = 1e-4 * lambda;
    double term = std::pow(head_end, alpha + 1.0);
    for (int i = 0; i < 4; ++i) {
      head_value -= term / ((alpha + 1.0 + i) * lambda);
      term *= head_end / lambda;
    }
  }
  auto excised = [&](double eps) {
    return head_value + integrate(f, head_end, lambda - eps, tol) +
           integrate(f, lambda + eps, R, tol);
  };
  // excision error is a*eps + b*eps^3; one Richardson level removes a
  const double eps = 1e-4 * std::min(lambda, R - lambda);
  const double coarse = excised(eps);
  const double fine = excised(0.5 * eps);
  return C / M_PI * (2.0 * fine - coarse);
}

}  // namespace ssde::spectral
