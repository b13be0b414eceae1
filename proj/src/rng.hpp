#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <cstring>

namespace sg {

// Counter-based generator: every draw is a pure function of (seed, counter),
// so concurrent consumers never share state and reruns are bit-identical.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

inline std::uint64_t double_bits(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  return bits;
}

// Maps 64 random bits to [0, 1) with 53-bit resolution.
inline double bits_to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Small sequential generator for sampling certificates.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {}

  std::uint64_t next_bits() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_);
  }

  double unit() { return bits_to_unit(next_bits()); }            // [0, 1)
  double symmetric() { return 2.0 * unit() - 1.0; }              // [-1, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  Eigen::VectorXd vector_in_cube(int dim, double half_width) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = half_width * symmetric();
    return v;
  }

  // Uniform direction (normalized cube sample; fine for sampling checks).
  Eigen::VectorXd direction(int dim) {
    for (;;) {
      Eigen::VectorXd v = vector_in_cube(dim, 1.0);
      double n = v.norm();
      if (n > 1e-3) return v / n;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace sg
