#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace quadfeat {

// splitmix64 finalizer; bijective on 64-bit words
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child-stream seeds: fold each path word through the mixer so that
// (seed, path) pairs map to well-separated streams.  The same path always
// yields the same child seed; there is no hidden global state anywhere.
template <class... Words>
std::uint64_t derive_seed(std::uint64_t seed, Words... path) {
  std::uint64_t s = mix64(seed);
  ((s = mix64(s ^ mix64(static_cast<std::uint64_t>(path)))), ...);
  return s;
}

// First word of every derivation path; listed in one place so no two
// consumers of the same parent seed can collide.
namespace seed_tag {
inline constexpr std::uint64_t kButterflyAngles = 0xA1;
inline constexpr std::uint64_t kButterflyPerm = 0xA2;
inline constexpr std::uint64_t kOrthoChild = 0xB1;
inline constexpr std::uint64_t kSrRadii = 0xC1;
inline constexpr std::uint64_t kSrQ = 0xC2;
inline constexpr std::uint64_t kFeatureBlock = 0xC3;
inline constexpr std::uint64_t kBaselineBlock = 0xD1;
inline constexpr std::uint64_t kSubset = 0xE1;
inline constexpr std::uint64_t kMap = 0xE2;
inline constexpr std::uint64_t kSynthetic = 0xE3;
}  // namespace seed_tag

// xoshiro256++ with splitmix64 state expansion.  Small, fast, and good
// enough statistically for Monte Carlo work; not for cryptography.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      word = mix64(s);
      s = word;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform on [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0, 1]; safe as a log() argument
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; the second deviate is cached
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // chi distribution with k degrees of freedom (sqrt of chi-squared)
  double chi(int k) {
    if (k < 1) throw std::invalid_argument("chi: dof must be >= 1");
    if (k <= 64) {
      double sum = 0.0;
      for (int i = 0; i < k; ++i) {
        const double g = gaussian();
        sum += g * g;
      }
      return std::sqrt(sum);
    }
    // chi^2(k) = 2 * Gamma(k/2, 1)
    return std::sqrt(2.0 * gamma_shape(0.5 * static_cast<double>(k)));
  }

  // Gamma(shape, 1) for shape >= 1, Marsaglia-Tsang squeeze
  double gamma_shape(double shape) {
    if (shape < 1.0) throw std::invalid_argument("gamma_shape: shape must be >= 1");
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = gaussian();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // unbiased integer on [0, n) by rejection
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Fisher-Yates shuffle of 0..n-1
  std::vector<int> permutation(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
      const auto j = static_cast<int>(below(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    return p;
  }

  // k distinct indices from [0, n), order-insensitive draw order fixed
  std::vector<int> sample_without_replacement(int n, int k) {
    if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
    // partial Fisher-Yates over an index table
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<int> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const auto j =
          i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
      out[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
    }
    return out;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace quadfeat
