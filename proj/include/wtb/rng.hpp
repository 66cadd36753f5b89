#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace wtb {

// xoshiro256++ with splitmix64 seeding. Self-contained so that sampled values
// are identical across standard libraries and runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on (0,1]; never returns 0 so log() is safe
  double uniform_pos() {
    return ((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // uniform on [0,1)
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Box-Muller, one value per pair of uniforms
  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double th = 6.283185307179586477 * uniform();
    return r * std::cos(th);
  }

  // Marsaglia-Tsang; valid for any shape > 0, unit scale
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi2(double dof) { return 2.0 * gamma(0.5 * dof); }

  // chi2(dof) with noncentrality nc (sum convention: mean = dof + nc)
  double nc_chi2(long dof, double nc) {
    const double g = normal() + std::sqrt(nc);
    double w = g * g;
    if (dof > 1) w += chi2(static_cast<double>(dof - 1));
    return w;
  }

  static std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Stable substream derivation: (master, index, tag) -> seed. Tasks seeded this
// way are order-independent under any scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  std::uint64_t x = master;
  std::uint64_t a = Rng::splitmix(x);
  x ^= index * 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = Rng::splitmix(x);
  x ^= h;
  std::uint64_t c = Rng::splitmix(x);
  return a ^ (b + 0x9e3779b97f4a7c15ULL) ^ c;
}

}  // namespace wtb
