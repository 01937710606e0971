#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "ssde/error.hpp"
#include "ssde/matrix.hpp"
#include "ssde/rng.hpp"
#include "ssde/svd.hpp"

namespace ssde::sde {

// Discrete-time integration of the matrix-valued Ito SDE behind noisy SGD:
//   dW = -eta * grad * dt + noise,
// isotropic noise sqrt(2 eta D dt) G, or B[xi] sqrt(2 eta dt) with
// B B^T = Sigma in the anisotropic case.

struct WeightState {
  Matrix matrix;
  long step = 0;
  double time = 0.0;
};

// Covariance of the matrix-valued noise, kept as an operator so diagonal and
// low-rank structures stay cheap: apply(E) = Sigma[E]; factor(Xi) maps a
// standard normal matrix to noise with covariance Sigma (factor factor^T =
// Sigma).
struct CovarianceOp {
  std::function<Matrix(const Matrix&)> apply;
  std::function<Matrix(const Matrix&)> factor;

  static CovarianceOp scaled_identity(double d) {
    const double root = std::sqrt(d);
    return CovarianceOp{[d](const Matrix& e) { return Matrix(d * e); },
                        [root](const Matrix& xi) { return Matrix(root * xi); }};
  }

  // per-entry variances
  static CovarianceOp diagonal(const Matrix& variances) {
    Matrix roots = variances.cwiseSqrt();
    return CovarianceOp{
        [variances](const Matrix& e) { return Matrix(variances.cwiseProduct(e)); },
        [roots](const Matrix& xi) { return Matrix(roots.cwiseProduct(xi)); }};
  }
};

struct NoiseModel {
  enum class Kind { Isotropic, Anisotropic };
  Kind kind = Kind::Isotropic;
  CovarianceOp covariance;  // anisotropic only

  static NoiseModel isotropic() { return NoiseModel{}; }
  static NoiseModel anisotropic(CovarianceOp op) {
    return NoiseModel{Kind::Anisotropic, std::move(op)};
  }
};

struct SDEParams {
  double eta = 1.0;
  double D = 0.0;
  double dt = 1.0;
  NoiseModel noise = NoiseModel::isotropic();
};

using GradientOracle = std::function<Matrix(const WeightState&)>;

inline void check_sde_params(const SDEParams& p) {
  if (!(p.eta > 0.0)) throw DomainError("SDEParams: eta must be positive");
  if (!(p.D >= 0.0)) throw DomainError("SDEParams: D must be nonnegative");
  if (!(p.dt > 0.0)) throw DomainError("SDEParams: dt must be positive");
}

// Cheap runtime sanity probe of the covariance oracle: symmetry and
// nonnegativity of the quadratic form on random directions.
inline void check_covariance_psd(const CovarianceOp& cov, Eigen::Index m, Eigen::Index n,
                                 RngStream& rng, int probes = 2) {
  for (int p = 0; p < probes; ++p) {
    Matrix e = gaussian_matrix(m, n, rng);
    Matrix f = gaussian_matrix(m, n, rng);
    Matrix se = cov.apply(e);
    const double quad = (e.array() * se.array()).sum();
    const double scale = e.squaredNorm();
    if (quad < -1e-10 * scale * (1.0 + se.norm() / (e.norm() + 1e-300))) {
      throw DomainError("covariance oracle is not positive semidefinite");
    }
    const double sym_gap =
        std::abs((f.array() * se.array()).sum() - (e.array() * cov.apply(f).array()).sum());
    if (sym_gap > 1e-8 * (1.0 + std::abs(quad))) {
      throw DomainError("covariance oracle is not symmetric");
    }
  }
}

inline WeightState step_matrix_sde(const WeightState& state, const Matrix& grad,
                                   const SDEParams& params, RngStream& rng) {
  check_sde_params(params);
  if (grad.rows() != state.matrix.rows() || grad.cols() != state.matrix.cols()) {
    throw DomainError("step_matrix_sde: gradient shape mismatch");
  }
  WeightState next;
  next.matrix = state.matrix - params.eta * params.dt * grad;
  if (params.D > 0.0 || params.noise.kind == NoiseModel::Kind::Anisotropic) {
    if (params.noise.kind == NoiseModel::Kind::Isotropic) {
      const double amp = std::sqrt(2.0 * params.eta * params.D * params.dt);
      next.matrix += amp * gaussian_matrix(state.matrix.rows(), state.matrix.cols(), rng);
    } else {
      check_covariance_psd(params.noise.covariance, state.matrix.rows(), state.matrix.cols(), rng, 1);
      const double amp = std::sqrt(2.0 * params.eta * params.dt);
      Matrix xi = gaussian_matrix(state.matrix.rows(), state.matrix.cols(), rng);
      next.matrix += amp * params.noise.covariance.factor(xi);
    }
  }
  next.step = state.step + 1;
  next.time = state.time + params.dt;
  return next;
}

using SnapshotRecorder = std::function<void(const WeightState&)>;

// Applies step_matrix_sde `steps` times. The recorder fires whenever
// state.step is a multiple of record_stride (including the initial state),
// and always on the final state.
inline WeightState simulate_weights(WeightState state, const GradientOracle& grad_oracle,
                                    const SDEParams& params, long steps, RngStream& rng,
                                    const SnapshotRecorder& recorder = nullptr,
                                    long record_stride = 1) {
  check_sde_params(params);
  if (steps < 0) throw DomainError("simulate_weights: steps must be >= 0");
  if (record_stride < 1) record_stride = 1;
  if (params.noise.kind == NoiseModel::Kind::Anisotropic) {
    check_covariance_psd(params.noise.covariance, state.matrix.rows(), state.matrix.cols(), rng);
  }
  auto maybe_record = [&](const WeightState& s, bool force) {
    if (recorder && (force || s.step % record_stride == 0)) recorder(s);
  };
  maybe_record(state, false);
  for (long i = 0; i < steps; ++i) {
    Matrix grad = grad_oracle ? grad_oracle(state)
                              : Matrix::Zero(state.matrix.rows(), state.matrix.cols());
    if (!grad.allFinite()) throw DomainError("simulate_weights: gradient has non-finite entries");
    state = step_matrix_sde(state, grad, params, rng);
    maybe_record(state, i + 1 == steps);
  }
  return state;
}

// ---- second-order response of a singular value ----
//
// Exact perturbation-theory quantities for sigma_k(W), obtained from the
// symmetric embedding [[0, W], [W^T, 0]]. These power the anisotropic drift
// correction and the finite-difference oracles.

struct SvdFrame {
  Matrix U;  // m x m
  Vector s;  // n
  Matrix V;  // n x n
  int m = 0;
  int n = 0;
};

inline SvdFrame make_frame(const Matrix& W) {
  if (W.rows() < W.cols()) throw DomainError("make_frame: need rows >= cols (transpose first)");
  SvdResult full = svd_full(W);
  return SvdFrame{std::move(full.U), std::move(full.s), std::move(full.V),
                  static_cast<int>(W.rows()), static_cast<int>(W.cols())};
}

inline void check_mode_gaps(const SvdFrame& f, int k, double gap_tol) {
  if (k < 0 || k >= f.n) throw DomainError("mode index out of range");
  if (!(f.s(k) > gap_tol)) {
    throw DegeneracyError("sigma_k too close to zero", k, f.s(k));
  }
  for (int j = 0; j < f.n; ++j) {
    if (j == k) continue;
    const double gap = std::abs(f.s(k) - f.s(j));
    if (gap < gap_tol) throw DegeneracyError("singular value gap below tolerance", k, gap);
  }
}

// E -> d^2/dt^2 sigma_k(W + tE) |_{t=0}
inline double sigma_hessian_quadform(const SvdFrame& f, int k, const Matrix& E) {
  double acc = 0.0;
  for (int j = 0; j < f.n; ++j) {
    if (j == k) continue;
    const double mjk = f.U.col(j).dot(E * f.V.col(k));
    const double mkj = f.U.col(k).dot(E * f.V.col(j));
    const double plus = mjk + mkj, minus = mjk - mkj;
    acc += plus * plus / (2.0 * (f.s(k) - f.s(j))) + minus * minus / (2.0 * (f.s(k) + f.s(j)));
  }
  for (int j = f.n; j < f.m; ++j) {
    const double njk = f.U.col(j).dot(E * f.V.col(k));
    acc += njk * njk / f.s(k);
  }
  return acc;
}

// E -> first-order change of the gradient u_k v_k^T, i.e. the Hessian of
// sigma_k applied to E as an operator
inline Matrix sigma_hessian_apply(const SvdFrame& f, int k, const Matrix& E) {
  Vector du = Vector::Zero(f.m);
  Vector dv = Vector::Zero(f.n);
  const Vector Evk = E * f.V.col(k);
  const Vector Etuk = E.transpose() * f.U.col(k);
  for (int j = 0; j < f.n; ++j) {
    if (j == k) continue;
    const double mjk = f.U.col(j).dot(Evk);
    const double mkj = f.V.col(j).dot(Etuk);
    const double denom = f.s(k) * f.s(k) - f.s(j) * f.s(j);
    du += (f.s(k) * mjk + f.s(j) * mkj) / denom * f.U.col(j);
    dv += (f.s(k) * mkj + f.s(j) * mjk) / denom * f.V.col(j);
  }
  for (int j = f.n; j < f.m; ++j) {
    du += f.U.col(j).dot(Evk) / f.s(k) * f.U.col(j);
  }
  return du * f.V.col(k).transpose() + f.U.col(k) * dv.transpose();
}

// trace of the exact Hessian of sigma_k: (m-n)/sigma + 2 sum sigma/(sigma^2-sigma_j^2)
inline double sigma_laplacian_exact(const Vector& sigmas, int k, int m, int n) {
  double rep = 0.0;
  for (int j = 0; j < sigmas.size(); ++j) {
    if (j == k) continue;
    rep += sigmas(k) / (sigmas(k) * sigmas(k) - sigmas(j) * sigmas(j));
  }
  return static_cast<double>(m - n) / sigmas(k) + 2.0 * rep;
}

// eta * Tr[Sigma * Hess(sigma_k)], the second-order Ito drift correction for
// anisotropic noise. Contracts the covariance oracle against the analytic
// second-derivative tensor over the standard basis; O(mn) oracle calls, meant
// for desk-scale matrices.
inline double anisotropic_sigma_drift(const Matrix& W, const CovarianceOp& sigma_op, int k,
                                      double eta, double gap_tol_rel = 1e-8) {
  if (W.rows() < W.cols()) {
    throw DomainError("anisotropic_sigma_drift: need rows >= cols (transpose first)");
  }
  SvdFrame f = make_frame(W);
  check_mode_gaps(f, k, gap_tol_rel * std::max(f.s(0), 1e-300));
  double trace = 0.0;
  Matrix basis = Matrix::Zero(f.m, f.n);
  for (int i = 0; i < f.m; ++i) {
    for (int j = 0; j < f.n; ++j) {
      basis(i, j) = 1.0;
      const Matrix h = sigma_hessian_apply(f, k, basis);
      trace += (sigma_op.apply(basis).array() * h.array()).sum();
      basis(i, j) = 0.0;
    }
  }
  return eta * trace;
}

}  // namespace ssde::sde
