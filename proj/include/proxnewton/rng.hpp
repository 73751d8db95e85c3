#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

namespace proxnewton {

/// Counter-based SplitMix64 stream.
///
/// Output word k (1-based) of the stream with seed `s` is
///     mix(s + k * 0x9E3779B97F4A7C15)
/// where mix is the standard SplitMix64 finalizer. Derived draws are fixed
/// so that a port in any language can reproduce a stream bit for bit:
///   - uniform():    top 53 bits of one word, scaled by 2^-53, in [0,1)
///   - uniform_pos():(top 53 bits + 1) * 2^-53, in (0,1]
///   - normal():     Box-Muller, exactly two words per draw:
///                   sqrt(-2 ln u1) * cos(2 pi u2) with u1 = uniform_pos(),
///                   u2 = uniform()  (the sine branch is discarded)
///   - sign():       +1 if bit 0 of one word is set, else -1
///   - uniform_index(n): floor(uniform() * n)
///   - sample_indices(n, k): partial Fisher-Yates over 0..n-1, k swap draws,
///                   result sorted ascending
///   - chi_squared(d): sum of d normal() squares
///   - student_t(d): normal() * sqrt(d / chi_squared(d)), d+1 normals total
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double sign() { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

  /// Uniform integer in [0, n). The 2^-53 rounding bias is irrelevant here;
  /// reproducibility is what matters.
  std::size_t uniform_index(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return std::min(i, n - 1);
  }

  double chi_squared(int dof) {
    double s = 0.0;
    for (int i = 0; i < dof; ++i) {
      const double z = normal();
      s += z * z;
    }
    return s;
  }

  double student_t(int dof) {
    const double z = normal();
    return z * std::sqrt(static_cast<double>(dof) / chi_squared(dof));
  }

  /// k distinct indices from {0,...,n-1}, sorted ascending.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + uniform_index(n - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> out(pool.begin(), pool.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace proxnewton
