#ifndef EQUIPROJ_RANDOM_HPP
#define EQUIPROJ_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "equiproj/linalg.hpp"

namespace equiproj {

/// Seeded generator with draws defined in terms of raw 64-bit outputs, so
/// sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller; the spare is discarded to keep the stream position simple.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t next() { return engine_(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

 private:
  std::mt19937_64 engine_;
};

inline ComplexMatrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (auto& z : m.data()) z = Complex(rng.normal(), rng.normal());
  return m;
}

/// Haar-ish random unitary: Gram-Schmidt on a complex Gaussian matrix.
inline ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
  ComplexMatrix a = random_gaussian(n, n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex c{};
        for (std::size_t i = 0; i < n; ++i) c += std::conj(a(i, k)) * a(i, j);
        for (std::size_t i = 0; i < n; ++i) a(i, j) -= c * a(i, k);
      }
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::norm(a(i, j));
    s = std::sqrt(s);
    for (std::size_t i = 0; i < n; ++i) a(i, j) /= s;
  }
  return a;
}

}  // namespace equiproj

#endif  // EQUIPROJ_RANDOM_HPP
