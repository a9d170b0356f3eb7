#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace wbt {

// Deterministic RNG with self-contained distributions. std:: distribution
// objects are implementation-defined, which would break byte-reproducible
// pipelines across standard libraries, so we only use the mt19937_64 engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). n must be > 0; modulo bias is negligible here.
  std::uint64_t uniform_index(std::uint64_t n) { return engine_() % n; }

  // Box-Muller without caching so the draw count per call is fixed.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Derive an independent stream, e.g. per environment or per episode.
  Rng spawn(std::uint64_t stream) {
    std::uint64_t s = engine_();
    return Rng(s ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wbt
