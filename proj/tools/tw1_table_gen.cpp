// Regenerates include/ssde/detail/tw1_table.hpp.
//
// Tracy-Widom F1 is sampled through the beta=1 Laguerre tridiagonal ensemble
// (Dumitriu-Edelman): the bidiagonal chi-entry matrix B has the same singular
// values in law as an m x n standard Gaussian matrix, so the largest
// eigenvalue of B B^T is a genuine Wishart edge sample at a fraction of the
// dense cost. Samples are centered with the (m - 1/2, n - 1/2) variant of the
// Johnstone constants, which converges at O(n^{-2/3}) instead of O(n^{-1/3}).
//
// Usage: tw1_table_gen [--samples N] [--size n] [--seed s] > tw1_table.hpp

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "ssde/parallel.hpp"
#include "ssde/rng.hpp"

namespace {

// eigenvalue count of the tridiagonal (diag, off) below x, by Sturm sequence
int sturm_count_below(const std::vector<double>& diag, const std::vector<double>& off, double x) {
  const std::size_t n = diag.size();
  int count = 0;
  double p = diag[0] - x;
  if (p < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    double denom = (p == 0.0) ? 1e-300 : p;
    p = diag[i] - x - off[i - 1] * off[i - 1] / denom;
    if (p < 0.0) ++count;
  }
  return count;
}

double tridiag_lambda_max(const std::vector<double>& diag, const std::vector<double>& off) {
  const std::size_t n = diag.size();
  double hi = diag[0] + std::abs(off[0]);
  double lo = diag[0] - std::abs(off[0]);
  for (std::size_t i = 0; i < n; ++i) {
    double radius = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
    hi = std::max(hi, diag[i] + radius);
    lo = std::min(lo, diag[i] - radius);
  }
  const int want = static_cast<int>(n);  // all n eigenvalues strictly below => above lambda_max
  for (int iter = 0; iter < 200 && hi - lo > 1e-9 * std::max(1.0, std::abs(hi)); ++iter) {
    double mid = 0.5 * (lo + hi);
    if (sturm_count_below(diag, off, mid) >= want) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// one centered/scaled Wishart edge sample
double edge_sample(ssde::RngStream& rng, int m, int n) {
  // B bidiagonal: diag chi_{m-i}, subdiag chi_{n-1-i}; T = B B^T tridiagonal
  std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n) - 1);
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = rng.chi(static_cast<double>(m - i));
  for (int i = 0; i + 1 < n; ++i) y[static_cast<std::size_t>(i)] = rng.chi(static_cast<double>(n - 1 - i));
  std::vector<double> diag(static_cast<std::size_t>(n)), off(static_cast<std::size_t>(n) - 1);
  for (int i = 0; i < n; ++i) {
    double yi = (i > 0) ? y[static_cast<std::size_t>(i - 1)] : 0.0;
    diag[static_cast<std::size_t>(i)] =
        x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)] + yi * yi;
  }
  for (int i = 0; i + 1 < n; ++i) {
    off[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  }
  double lmax = tridiag_lambda_max(diag, off);
  double sm = std::sqrt(m - 0.5), sn = std::sqrt(n - 0.5);
  double mu = (sm + sn) * (sm + sn);
  double sigma = (sm + sn) * std::cbrt(1.0 / sm + 1.0 / sn);
  return (lmax - mu) / sigma;
}

}  // namespace

int main(int argc, char** argv) {
  long samples = 250000;
  int size = 1000;
  std::uint64_t seed = 20240817;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--samples") && i + 1 < argc) samples = std::atol(argv[++i]);
    else if (!std::strcmp(argv[i], "--size") && i + 1 < argc) size = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) seed = std::strtoull(argv[++i], nullptr, 10);
    else {
      std::fprintf(stderr, "usage: %s [--samples N] [--size n] [--seed s]\n", argv[0]);
      return 2;
    }
  }

  std::vector<double> s(static_cast<std::size_t>(samples));
  const int threads = ssde::max_threads();
  std::vector<std::thread> pool;
  std::atomic<long> done{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (long i = t; i < samples; i += threads) {
        ssde::RngStream rng(seed, "tw1-table", static_cast<std::uint64_t>(i));
        s[static_cast<std::size_t>(i)] = edge_sample(rng, size, size);
        long d = ++done;
        if (t == 0 && d % 20000 < threads) std::fprintf(stderr, "  %ld / %ld\n", d, samples);
      }
    });
  }
  for (auto& th : pool) th.join();
  std::sort(s.begin(), s.end());

  const int table_n = 600;
  const double s_min = -10.0, s_max = 8.0;
  std::vector<double> grid(table_n), cdf(table_n);
  for (int i = 0; i < table_n; ++i) {
    grid[static_cast<std::size_t>(i)] = s_min + (s_max - s_min) * i / (table_n - 1);
  }
  for (int i = 0; i < table_n; ++i) {
    auto it = std::upper_bound(s.begin(), s.end(), grid[static_cast<std::size_t>(i)]);
    cdf[static_cast<std::size_t>(i)] =
        static_cast<double>(it - s.begin()) / static_cast<double>(samples);
  }

  // Splice known tail asymptotics where the empirical CDF runs out of
  // samples: F ~ exp(-|s|^3/24) on the left, 1-F ~ exp(-(2/3) s^{3/2}) on
  // the right (leading exponents for beta=1).
  int left_anchor = 0;
  while (left_anchor < table_n && cdf[static_cast<std::size_t>(left_anchor)] < 1e-3) ++left_anchor;
  for (int i = left_anchor - 1; i >= 0; --i) {
    double sa = grid[static_cast<std::size_t>(left_anchor)], si = grid[static_cast<std::size_t>(i)];
    double f = cdf[static_cast<std::size_t>(left_anchor)] *
               std::exp(-(std::pow(std::abs(si), 3) - std::pow(std::abs(sa), 3)) / 24.0);
    cdf[static_cast<std::size_t>(i)] = std::max(f, 1e-18);
  }
  int right_anchor = table_n - 1;
  while (right_anchor >= 0 && cdf[static_cast<std::size_t>(right_anchor)] > 1.0 - 1e-3) --right_anchor;
  for (int i = right_anchor + 1; i < table_n; ++i) {
    double sa = grid[static_cast<std::size_t>(right_anchor)], si = grid[static_cast<std::size_t>(i)];
    double q = (1.0 - cdf[static_cast<std::size_t>(right_anchor)]) *
               std::exp(-(2.0 / 3.0) * (std::pow(si, 1.5) - std::pow(sa, 1.5)));
    cdf[static_cast<std::size_t>(i)] = std::min(1.0 - std::max(q, 1e-18), 1.0);
  }
  for (int i = 1; i < table_n; ++i) {
    cdf[static_cast<std::size_t>(i)] =
        std::max(cdf[static_cast<std::size_t>(i)], cdf[static_cast<std::size_t>(i - 1)]);
  }

  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(samples);
  double var = 0.0;
  for (double v : s) var += (v - mean) * (v - mean);
  var /= static_cast<double>(samples - 1);
  double median = s[static_cast<std::size_t>(samples / 2)];

  std::printf("// Tracy-Widom F1 CDF table. Generated by tools/tw1_table_gen\n");
  std::printf("// (beta=1 Laguerre tridiagonal ensemble, %ld samples, matrix size %d,\n", samples, size);
  std::printf("// seed %llu). Sample mean %.4f, var %.4f, median %.4f.\n",
              static_cast<unsigned long long>(seed), mean, var, median);
  std::printf("#pragma once\n\nnamespace ssde::detail {\n\n");
  std::printf("inline constexpr int kTw1TableSize = %d;\n", table_n);
  std::printf("inline constexpr double kTw1SMin = %.1f;\n", s_min);
  std::printf("inline constexpr double kTw1SMax = %.1f;\n\n", s_max);
  std::printf("inline constexpr double kTw1Cdf[kTw1TableSize] = {\n");
  for (int i = 0; i < table_n; ++i) {
    std::printf("    %.10e,\n", cdf[static_cast<std::size_t>(i)]);
  }
  std::printf("};\n\n}  // namespace ssde::detail\n");
  return 0;
}
