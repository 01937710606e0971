#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "ssde/error.hpp"
#include "ssde/matrix.hpp"
#include "ssde/svd.hpp"

namespace ssde::forecast {

// Bootstrapped-drift prediction of the top-k singular triplets from a stream
// of loss gradients, without recomputing SVDs. Callers pass raw gradients;
// the -eta factor is applied internally (passing -eta * grad as well would
// double the scaling).

struct ForecastConfig {
  int k = 8;
  double eta = 1e-3;
  double epsilon_rel = 1e-8;  // gap regularizer, as a fraction of sigma_1
  double delta = 1e-12;       // positivity floor
  int orth_every = 1;         // re-orthonormalization stride
  // Optional second-order drift correction, off by default: adds
  // eta * D * [ (m-n+1)/(2 sigma_i) + sum_{j<=k, j!=i} sigma_i/(sigma_i^2-sigma_j^2) ]
  // per step, with the repulsion sum restricted to the tracked modes.
  bool ito_correction = false;
  double diffusion = 0.0;
};

struct ForecastState {
  Matrix U;       // m x k, column-orthonormal
  Vector sigmas;  // k, nonincreasing, >= delta
  Matrix V;       // n x k, column-orthonormal
  long step = 0;
  std::vector<int> last_permutation;  // non-empty when a crossing forced a re-sort
};

inline void check_config(const ForecastConfig& c) {
  if (c.k < 1) throw DomainError("ForecastConfig: k must be >= 1");
  if (!(c.epsilon_rel > 0.0)) throw DomainError("ForecastConfig: epsilon must be positive");
  if (!(c.delta > 0.0)) throw DomainError("ForecastConfig: delta must be positive");
  if (c.orth_every < 1) throw DomainError("ForecastConfig: orth_every must be >= 1");
}

inline ForecastState init_forecast(const Matrix& w0, const ForecastConfig& config) {
  check_config(config);
  if (config.k > std::min(w0.rows(), w0.cols())) {
    throw DomainError("init_forecast: k exceeds min(m, n)");
  }
  SvdResult top = svd_top_k(w0, config.k);
  ForecastState state;
  state.U = std::move(top.U);
  state.V = std::move(top.V);
  state.sigmas = top.s.cwiseMax(config.delta);
  return state;
}

namespace detail {

inline void modified_gram_schmidt(Matrix& A) {
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      A.col(j) -= A.col(i).dot(A.col(j)) * A.col(i);
    }
    const double norm = A.col(j).norm();
    if (norm > 1e-300) {
      A.col(j) /= norm;
    } else {
      // degenerate column: replace with a basis vector orthogonal to the rest
      for (Eigen::Index b = 0; b < A.rows(); ++b) {
        Vector cand = Vector::Zero(A.rows());
        cand(b) = 1.0;
        for (Eigen::Index i = 0; i < j; ++i) cand -= A.col(i).dot(cand) * A.col(i);
        if (cand.norm() > 0.5) {
          A.col(j) = cand / cand.norm();
          break;
        }
      }
    }
  }
}

}  // namespace detail

inline ForecastState forecast_step(const ForecastState& state, const Matrix& grad,
                                   const ForecastConfig& config) {
  check_config(config);
  if (grad.rows() != state.U.rows() || grad.cols() != state.V.rows()) {
    throw DomainError("forecast_step: gradient shape mismatch");
  }
  const int k = static_cast<int>(state.sigmas.size());
  const double eps = config.epsilon_rel * std::max(state.sigmas(0), config.delta);

  const Matrix G = -config.eta * grad;
  const Matrix M = state.U.transpose() * G * state.V;  // k x k

  ForecastState next;
  next.step = state.step + 1;
  next.sigmas.resize(k);
  Matrix newU(state.U.rows(), k), newV(state.V.rows(), k);
  for (int i = 0; i < k; ++i) {
    Vector du = Vector::Zero(state.U.rows());
    Vector dv = Vector::Zero(state.V.rows());
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      const double coef = M(j, i) / (state.sigmas(i) - state.sigmas(j) + eps) +
                          M(i, j) / (state.sigmas(i) + state.sigmas(j) + eps);
      du += coef * state.U.col(j);
      dv += coef * state.V.col(j);
    }
    double sigma = state.sigmas(i) + M(i, i);
    if (config.ito_correction) {
      double repulsion = 0.0;
      for (int j = 0; j < k; ++j) {
        if (j == i) continue;
        const double dl = state.sigmas(i) * state.sigmas(i) - state.sigmas(j) * state.sigmas(j);
        repulsion += state.sigmas(i) / (dl + std::copysign(eps * eps, dl));
      }
      const int m = static_cast<int>(state.U.rows()), n = static_cast<int>(state.V.rows());
      const int mm = std::max(m, n), nn = std::min(m, n);
      sigma += config.eta * config.diffusion *
               ((mm - nn + 1) / (2.0 * std::max(state.sigmas(i), config.delta)) + repulsion);
    }
    next.sigmas(i) = std::max(sigma, config.delta);
    newU.col(i) = state.U.col(i) + du;
    newV.col(i) = state.V.col(i) + dv;
  }

  if (next.step % config.orth_every == 0) {
    detail::modified_gram_schmidt(newU);
    detail::modified_gram_schmidt(newV);
  }

  // align signs with the previous frame; U and V flip jointly so U S V^T is
  // unchanged
  for (int i = 0; i < k; ++i) {
    if (state.U.col(i).dot(newU.col(i)) < 0.0) {
      newU.col(i) = -newU.col(i);
      newV.col(i) = -newV.col(i);
    }
  }

  // crossings: keep the top-k contract meaningful by re-sorting jointly
  bool sorted = true;
  for (int i = 0; i + 1 < k; ++i) {
    if (next.sigmas(i) < next.sigmas(i + 1)) {
      sorted = false;
      break;
    }
  }
  if (!sorted) {
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    Vector sig = next.sigmas;
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return sig(a) > sig(b); });
    Matrix pu(newU.rows(), k), pv(newV.rows(), k);
    Vector ps(k);
    for (int i = 0; i < k; ++i) {
      ps(i) = sig(perm[static_cast<std::size_t>(i)]);
      pu.col(i) = newU.col(perm[static_cast<std::size_t>(i)]);
      pv.col(i) = newV.col(perm[static_cast<std::size_t>(i)]);
    }
    next.sigmas = std::move(ps);
    newU = std::move(pu);
    newV = std::move(pv);
    next.last_permutation = std::move(perm);
  }

  next.U = std::move(newU);
  next.V = std::move(newV);
  return next;
}

struct ForecastTrajectory {
  // row t = predicted sigmas after t steps (row 0 is the initial spectrum)
  Matrix sigmas;
  // signed errors vs the reference spectra, when provided (same layout)
  std::optional<Matrix> errors;
  // ||U_pred^T U_true||_F / sqrt(k) per step, when a subspace reference is given
  std::optional<Vector> alignment;
};

// Reference provider for diagnostics: returns the true top-k frame at a step,
// or nothing.
using SubspaceReference = std::function<std::optional<Matrix>(long step)>;

inline ForecastTrajectory forecast_trajectory(const Matrix& w0, const std::vector<Matrix>& grads,
                                              const ForecastConfig& config,
                                              const Matrix* true_sigmas = nullptr,
                                              const SubspaceReference& subspace_ref = nullptr) {
  ForecastState state = init_forecast(w0, config);
  const long T = static_cast<long>(grads.size());
  ForecastTrajectory out;
  out.sigmas.resize(T + 1, config.k);
  if (true_sigmas) {
    if (true_sigmas->rows() < T + 1 || true_sigmas->cols() < config.k) {
      throw DomainError("forecast_trajectory: reference spectra too small");
    }
    out.errors.emplace(T + 1, config.k);
  }
  if (subspace_ref) out.alignment.emplace(Vector::Zero(T + 1));

  auto emit = [&](long t) {
    out.sigmas.row(t) = state.sigmas.transpose();
    if (out.errors) {
      out.errors->row(t) = state.sigmas.transpose() - true_sigmas->row(t).head(config.k);
    }
    if (out.alignment) {
      if (auto ref = subspace_ref(t)) {
        (*out.alignment)(t) = (state.U.transpose() * (*ref)).norm() / std::sqrt(config.k);
      }
    }
  };
  emit(0);
  for (long t = 0; t < T; ++t) {
    state = forecast_step(state, grads[static_cast<std::size_t>(t)], config);
    emit(t + 1);
  }
  return out;
}

// Dominant per-step operation count: k*m*n for the projection plus
// k^2*max(m,n) for the vector updates and re-orthonormalization.
inline double step_cost_model(int m, int n, int k) {
  if (m < 1 || n < 1 || k < 1) throw DomainError("step_cost_model: dimensions must be positive");
  return static_cast<double>(k) * m * n +
         static_cast<double>(k) * k * std::max(m, n);
}

}  // namespace ssde::forecast
