#pragma once
// Deterministic random streams. The engine is std::mt19937_64; all
// distribution transforms are hand-rolled from raw uniforms so streams
// are bit-stable across standard library implementations.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace dbt {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent child stream; (seed, stream) pairs never collide in practice.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(seed ^ splitmix64(stream + 0x51ed2701)));
  }
  static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive(splitmix64(seed ^ splitmix64(a + 0x9277)), b);
  }

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // (0, 1]
  double uniform_open() { return 1.0 - uniform(); }

  // Inverse CDF of Beta(alpha, 1): F(x) = x^alpha.
  double beta_alpha_one(double alpha) { return std::pow(uniform_open(), 1.0 / alpha); }

  double exponential() { return -std::log(uniform_open()); }

  int uniform_int(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

  // Draw an index from a probability vector (CDF walk). The vector is
  // assumed to sum to ~1; trailing mass lands on the last index.
  int categorical(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("empty probability vector");
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dbt
