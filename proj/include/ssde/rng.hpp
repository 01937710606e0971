#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace ssde {

// All randomness in the toolkit flows from one user seed. Independent streams
// (per module, per replica) are derived by hashing (seed, tag, replica) with
// splitmix64, so ensembles can run in parallel and still reproduce exactly.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_key(std::uint64_t seed, std::string_view module_tag,
                                std::uint64_t replica = 0) {
  std::uint64_t h = splitmix64(seed);
  for (char c : module_tag) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
  return splitmix64(h ^ splitmix64(replica));
}

// mt19937_64 stream with its own normal sampler (Marsaglia polar) so that
// draws do not depend on the standard library's normal_distribution.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : engine_(key) {}

  RngStream(std::uint64_t seed, std::string_view module_tag, std::uint64_t replica = 0)
      : engine_(derive_key(seed, module_tag, replica)) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // uniform in (0, 1), never exactly 0
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Marsaglia-Tsang; boosted for shape < 1.
  double gamma(double shape) {
    if (shape < 1.0) {
      double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = gaussian();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // chi with k degrees of freedom (not chi-squared)
  double chi(double k) { return std::sqrt(2.0 * gamma(0.5 * k)); }

  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
      double l = std::exp(-mean), p = 1.0;
      int k = 0;
      do {
        ++k;
        p *= uniform_pos();
      } while (p > l);
      return k - 1;
    }
    // split large means to keep the product method in a safe range
    int half = poisson(0.5 * mean);
    return half + poisson(mean - 0.5 * mean);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ssde
