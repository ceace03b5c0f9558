#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace plankit {

// Deterministic random source. Only the raw mt19937_64 stream is consumed,
// so sequences are reproducible across compilers and standard libraries
// (std::*_distribution is implementation-defined and avoided on purpose).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(gen_() % span);
  }

  // Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Derive an independent child seed (for per-item generators).
  std::uint64_t next_seed() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace plankit
