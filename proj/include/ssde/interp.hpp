#pragma once

#include <cstddef>
#include <vector>

#include "ssde/error.hpp"

namespace ssde {

// Fritsch-Carlson monotone cubic (PCHIP). If the data are nondecreasing the
// interpolant is nondecreasing; evaluation clamps to the endpoint values
// outside the grid.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
      : x_(std::move(xs)), y_(std::move(ys)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DomainError("MonotoneCubic: need >= 2 matching points");
    for (std::size_t i = 1; i < n; ++i) {
      if (!(x_[i] > x_[i - 1])) throw DomainError("MonotoneCubic: x must be strictly increasing");
    }
    slope_.resize(n);
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    slope_[0] = d[0];
    slope_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] <= 0.0) {
        slope_[i] = 0.0;
      } else {
        // harmonic mean weighting keeps the interpolant monotone
        double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
        double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
        slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
      }
    }
    // clip endpoint slopes (Fritsch-Carlson condition at the boundary)
    for (std::size_t i : {std::size_t{0}, n - 1}) {
      std::size_t seg = (i == 0) ? 0 : n - 2;
      if (d[seg] == 0.0) {
        slope_[i] = 0.0;
      } else if (slope_[i] / d[seg] < 0.0) {
        slope_[i] = 0.0;
      } else if (slope_[i] / d[seg] > 3.0) {
        slope_[i] = 3.0 * d[seg];
      }
    }
  }

  double operator()(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    // binary search for the segment
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= x ? lo : hi) = mid;
    }
    double h = x_[lo + 1] - x_[lo];
    double t = (x - x_[lo]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1;
    double h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2;
    double h11 = t3 - t2;
    return h00 * y_[lo] + h10 * h * slope_[lo] + h01 * y_[lo + 1] + h11 * h * slope_[lo + 1];
  }

 private:
  std::vector<double> x_, y_, slope_;
};

}  // namespace ssde
