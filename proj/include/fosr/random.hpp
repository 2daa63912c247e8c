#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fosr {

/// splitmix64 finalizer; used to derive independent stream seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = master;
  for (auto t : tags) s = mix_seed(s, t);
  return s;
}

/// Random stream owned by exactly one chain or generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Gamma with shape/rate parameterization. Draws are floored at the
  /// smallest normal double so log-densities stay finite for tiny shapes.
  double gamma(double shape, double rate);
  double beta(double a, double b);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace fosr
