#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ssde/error.hpp"
#include "ssde/matrix.hpp"

namespace ssde {

// Reference SVD: one-sided Jacobi (Hestenes). Rotations orthogonalize the
// columns of A in place; the accumulated rotations form V and the normalized
// columns form U. Accurate to ~1e-14 relative residual for the matrix sizes
// this toolkit touches (<= 1024 per side).

struct SvdResult {
  Matrix U;  // m x r, column-orthonormal
  Vector s;  // r, nonincreasing, >= 0
  Matrix V;  // n x r, column-orthonormal
};

namespace detail {

// One-sided Jacobi on A (m x n, m >= n). Returns V; A is overwritten with U*S.
inline Matrix hestenes_sweeps(Matrix& A) {
  const Eigen::Index n = A.cols();
  Matrix V = Matrix::Identity(n, n);
  const double tol = 1e-15;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = A.col(p).squaredNorm();
        const double beta = A.col(q).squaredNorm();
        const double gamma = A.col(p).dot(A.col(q));
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
          const double ap = A(i, p);
          A(i, p) = c * ap - s * A(i, q);
          A(i, q) = s * ap + c * A(i, q);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double vp = V(i, p);
          V(i, p) = c * vp - s * V(i, q);
          V(i, q) = s * vp + c * V(i, q);
        }
      }
    }
    if (!rotated) break;
  }
  return V;
}

// Fill near-zero columns of U with unit vectors orthogonal to the others.
inline void complete_columns(Matrix& U, const std::vector<Eigen::Index>& degenerate) {
  for (Eigen::Index col : degenerate) {
    Vector cand = Vector::Zero(U.rows());
    for (Eigen::Index basis = 0; basis < U.rows(); ++basis) {
      cand.setZero();
      cand(basis) = 1.0;
      for (Eigen::Index j = 0; j < U.cols(); ++j) {
        if (j == col) continue;
        cand -= U.col(j).dot(cand) * U.col(j);
      }
      if (cand.norm() > 0.5) break;
    }
    U.col(col) = cand / cand.norm();
  }
}

}  // namespace detail

// Singular values only, nonincreasing.
inline Vector singular_values(const Matrix& W) {
  if (!W.allFinite()) throw DomainError("singular_values: non-finite entries");
  Matrix A = (W.rows() >= W.cols()) ? W : Matrix(W.transpose());
  detail::hestenes_sweeps(A);
  Vector s(A.cols());
  for (Eigen::Index j = 0; j < A.cols(); ++j) s(j) = A.col(j).norm();
  std::sort(s.data(), s.data() + s.size(), std::greater<double>());
  return s;
}

// Thin SVD with vectors, W = U diag(s) V^T. Zero singular directions get
// arbitrary orthonormal completions.
inline SvdResult svd(const Matrix& W) {
  if (!W.allFinite()) throw DomainError("svd: non-finite entries");
  const bool transposed = W.rows() < W.cols();
  Matrix A = transposed ? Matrix(W.transpose()) : W;
  Matrix V = detail::hestenes_sweeps(A);

  const Eigen::Index r = A.cols();
  Vector s(r);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(r));
  for (Eigen::Index j = 0; j < r; ++j) s(j) = A.col(j).norm();
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return s(a) > s(b); });

  SvdResult out;
  out.U.resize(A.rows(), r);
  out.V.resize(V.rows(), r);
  out.s.resize(r);
  std::vector<Eigen::Index> degenerate;
  const double tiny = 1e-300;
  for (Eigen::Index j = 0; j < r; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.s(j) = s(src);
    out.V.col(j) = V.col(src);
    if (s(src) > tiny) {
      out.U.col(j) = A.col(src) / s(src);
    } else {
      out.U.col(j).setZero();
      degenerate.push_back(j);
    }
  }
  detail::complete_columns(out.U, degenerate);
  if (transposed) std::swap(out.U, out.V);
  return out;
}

// Full SVD for m >= n: U is m x m (thin columns extended with an orthonormal
// basis of the left null space), s and V as in svd().
inline SvdResult svd_full(const Matrix& W) {
  if (W.rows() < W.cols()) throw DomainError("svd_full: need rows >= cols");
  SvdResult thin = svd(W);
  const Eigen::Index m = W.rows(), n = W.cols();
  Matrix U = Matrix::Zero(m, m);
  U.leftCols(n) = thin.U;
  std::vector<Eigen::Index> missing;
  for (Eigen::Index j = n; j < m; ++j) missing.push_back(j);
  detail::complete_columns(U, missing);
  // a second orthogonalization pass against everything keeps the tail clean
  for (Eigen::Index j = n; j < m; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) U.col(j) -= U.col(i).dot(U.col(j)) * U.col(i);
    U.col(j).normalize();
  }
  thin.U = std::move(U);
  return thin;
}

// Leading k singular triplets.
inline SvdResult svd_top_k(const Matrix& W, Eigen::Index k) {
  if (k < 1 || k > std::min(W.rows(), W.cols())) {
    throw DomainError("svd_top_k: k out of range");
  }
  SvdResult full = svd(W);
  SvdResult out;
  out.U = full.U.leftCols(k);
  out.s = full.s.head(k);
  out.V = full.V.leftCols(k);
  return out;
}

}  // namespace ssde
