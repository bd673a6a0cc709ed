#ifndef EQUIPROJ_FFT_HPP
#define EQUIPROJ_FFT_HPP

// Unnormalised discrete Fourier transform,
//   X[k] = sum_j x[j] exp(-+2 pi i j k / n)
// Iterative radix-2 for power-of-two lengths, direct summation otherwise.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "equiproj/linalg.hpp"

namespace equiproj::fft {

enum class Direction { Forward, Inverse };

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline Complex twiddle(std::size_t k, std::size_t n, Direction dir) {
  const double sign = dir == Direction::Forward ? -1.0 : 1.0;
  return std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(k % n) /
                             static_cast<double>(n));
}

inline void radix2(std::span<Complex> x, Direction dir) {
  const std::size_t n = x.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex w = twiddle(k, len, dir);
        const Complex a = x[start + k];
        const Complex b = x[start + k + half] * w;
        x[start + k] = a + b;
        x[start + k + half] = a - b;
      }
    }
  }
}

inline void direct(std::span<Complex> x, Direction dir) {
  const std::size_t n = x.size();
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex s{};
    for (std::size_t j = 0; j < n; ++j) s += x[j] * twiddle(j * k, n, dir);
    out[k] = s;
  }
  std::copy(out.begin(), out.end(), x.begin());
}

}  // namespace detail

inline void transform(std::span<Complex> x, Direction dir) {
  if (x.size() <= 1) return;
  if (detail::is_power_of_two(x.size())) detail::radix2(x, dir);
  else detail::direct(x, dir);
}

/// In-place 2-D transform over rows then columns. Inverse includes the
/// 1/(rows*cols) factor.
inline void transform2d(ComplexMatrix& m, Direction dir) {
  const std::size_t r = m.rows(), c = m.cols();
  for (std::size_t i = 0; i < r; ++i) transform(std::span<Complex>(&m(i, 0), c), dir);
  std::vector<Complex> col(r);
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t i = 0; i < r; ++i) col[i] = m(i, j);
    transform(col, dir);
    for (std::size_t i = 0; i < r; ++i) m(i, j) = col[i];
  }
  if (dir == Direction::Inverse) m *= Complex(1.0 / static_cast<double>(r * c), 0.0);
}

}  // namespace equiproj::fft

#endif  // EQUIPROJ_FFT_HPP
