#ifndef EQUIPROJ_TESTS_SUPPORT_HPP
#define EQUIPROJ_TESTS_SUPPORT_HPP

// Shared fixtures and independent oracles for the unit tests and the
// acceptance runner. Nothing here depends on the test framework.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "equiproj/equiproj.hpp"

namespace support {

using namespace equiproj;

struct NamedGroup {
  std::string name;
  GroupPtr group;
};

/// C2, C4, C8, D3, D4.
inline std::vector<NamedGroup> test_groups() {
  return {{"C2", make_cyclic(2)}, {"C4", make_cyclic(4)}, {"C8", make_cyclic(8)},
          {"D3", make_dihedral(3)}, {"D4", make_dihedral(4)}};
}

using equiproj::is_dihedral;
using equiproj::random_layer;
using equiproj::random_representation;

/// Textbook triple loop.
inline ComplexMatrix naive_matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex s{};
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline double frob(const ComplexMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.data()) s += std::norm(z);
  return std::sqrt(s);
}

inline double frob_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::norm(a.data()[k] - b.data()[k]);
  return std::sqrt(s);
}

/// max_g ||out(g) W - W in(g)||_F, evaluated with the naive product.
inline double max_commutator(const ComplexMatrix& w, const Representation& in, const Representation& out) {
  double worst = 0.0;
  for (Element g = 0; g < in.group()->order(); ++g)
    worst = std::max(worst, frob_diff(naive_matmul(out[g], w), naive_matmul(w, in[g])));
  return worst;
}

/// Circulant projection by direct wrapped-diagonal means.
inline ComplexMatrix diagonal_mean_oracle(const ComplexMatrix& t) {
  const std::size_t n = t.rows();
  ComplexMatrix out(n, n);
  for (std::size_t d = 0; d < n; ++d) {
    Complex s{};
    for (std::size_t i = 0; i < n; ++i) s += t(i, (i + d) % n);
    s /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out(i, (i + d) % n) = s;
  }
  return out;
}

/// Triangle symmetries as permutations of vertices {0, 1, 2}: index k < n is
/// r^k, index n + k is s r^k, with r(v) = v + 1 and s(v) = -v mod n.
inline std::vector<std::vector<std::size_t>> dihedral_permutations(std::size_t n) {
  std::vector<std::vector<std::size_t>> perms;
  for (std::size_t refl = 0; refl < 2; ++refl)
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<std::size_t> p(n);
      for (std::size_t v = 0; v < n; ++v) {
        const std::size_t rv = (v + k) % n;
        p[v] = refl ? (n - rv) % n : rv;
      }
      perms.push_back(p);
    }
  return perms;
}

/// Matrix-form C4 kernel projection: flatten to rows (p, a), columns
/// (q, b, i, j) and average rho_out(r) K rho_in(r)^* with rho_out = I (x) S^r
/// and rho_in = I (x) S^r (x) Rot_r built directly from index maps.
inline SteerableKernel c4_kernel_matrix_oracle(const SteerableKernel& k) {
  const std::size_t co = k.c_out(), ci = k.c_in(), s = k.size();
  const std::size_t rows = co * 4, cols = ci * 4 * s * s;
  ComplexMatrix w(rows, cols);
  for (std::size_t p = 0; p < co; ++p)
    for (std::size_t q = 0; q < ci; ++q)
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
          for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) w(p * 4 + a, ((q * 4 + b) * s + i) * s + j) = k(p, q, a, b, i, j);
  ComplexMatrix acc(rows, cols);
  for (std::size_t r = 0; r < 4; ++r) {
    ComplexMatrix pout(rows, rows), pin(cols, cols);
    for (std::size_t p = 0; p < co; ++p)
      for (std::size_t a = 0; a < 4; ++a) pout(p * 4 + (a + r) % 4, p * 4 + a) = 1.0;
    for (std::size_t q = 0; q < ci; ++q)
      for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t i = 0; i < s; ++i)
          for (std::size_t j = 0; j < s; ++j) {
            std::size_t ii = i, jj = j;
            for (std::size_t t = 0; t < r; ++t) {
              const std::size_t ni = jj, nj = s - 1 - ii;
              ii = ni;
              jj = nj;
            }
            pin(((q * 4 + (b + r) % 4) * s + ii) * s + jj, ((q * 4 + b) * s + i) * s + j) = 1.0;
          }
    acc += naive_matmul(naive_matmul(conj_transpose(pout), w), pin);
  }
  SteerableKernel out(co, ci, s);
  for (std::size_t p = 0; p < co; ++p)
    for (std::size_t q = 0; q < ci; ++q)
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
          for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
              out(p, q, a, b, i, j) = 0.25 * acc(p * 4 + a, ((q * 4 + b) * s + i) * s + j).real();
  return out;
}

inline SteerableKernel random_kernel(std::size_t co, std::size_t ci, std::size_t s, Rng& rng) {
  SteerableKernel k(co, ci, s);
  for (auto& v : k.values()) v = rng.normal();
  return k;
}

/// Straight-line evaluation of the regularised loss with Frobenius norms,
/// written without the tape or the library embedding.
template <class T>
T oracle_loss(const std::vector<T>& flat, const ToyArchitecture& a, const std::vector<Point>& pts,
              const std::vector<int>& labels, T lambda_g, T lambda_perp) {
  using C = std::complex<T>;
  const std::size_t D = a.degrees(), Cin = a.channels, H = a.hidden;
  const std::size_t r1 = D * H, c1 = D * Cin, r2 = D * H, c2 = D * H;
  std::size_t o = 0;
  auto take = [&](std::size_t rows, std::size_t cols) {
    std::vector<C> m(rows * cols);
    for (auto& z : m) {
      z = C(flat[o], flat[o + 1]);
      o += 2;
    }
    return m;
  };
  const auto w1 = take(r1, c1);
  const auto w2 = take(r2, c2);
  std::vector<T> wf(flat.begin() + static_cast<long>(o), flat.begin() + static_cast<long>(o + H));
  const T bias = flat[o + H];

  T task = 0;
  for (std::size_t b = 0; b < pts.size(); ++b) {
    const T x = pts[b][0], y = pts[b][1];
    const T r = std::sqrt(x * x + y * y);
    const C zhat = r == 0 ? C(1, 0) : C(x / r, y / r);
    std::vector<C> e(c1);
    for (std::size_t k = 0; k < D; ++k) {
      const int m = static_cast<int>(k) - a.max_degree;
      C ph(1, 0);
      for (int q = 0; q < std::abs(m); ++q) ph *= m > 0 ? zhat : std::conj(zhat);
      for (std::size_t n = 0; n < Cin; ++n) {
        const T c = Cin > 1 ? T(4) * T(n) / T(Cin - 1) : T(0);
        const T s = T(a.radial_width);
        e[k * Cin + n] = std::exp(-(r - c) * (r - c) / (2 * s * s)) * ph;
      }
    }
    std::vector<C> h1(r1), h2(r2);
    for (std::size_t i = 0; i < r1; ++i)
      for (std::size_t j = 0; j < c1; ++j) h1[i] += w1[i * c1 + j] * e[j];
    for (std::size_t i = 0; i < r2; ++i)
      for (std::size_t j = 0; j < c2; ++j) h2[i] += w2[i * c2 + j] * h1[j];
    T z = bias;
    for (std::size_t c = 0; c < H; ++c) {
      C s{};
      for (std::size_t k = 0; k < D; ++k) s += h2[k * H + c] * h2[(D - 1 - k) * H + c];
      z += wf[c] * s.real();
    }
    const T t = labels[b] == 1 ? T(1) : T(0);
    const T sp = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    task += sp - t * z;
  }
  task /= T(pts.size());

  auto fro = [](const std::vector<C>& m, std::size_t rows, std::size_t cols, std::size_t rb, std::size_t cb,
                bool off_only) {
    T s = 0;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (!off_only || i / rb != j / cb) s += std::norm(m[i * cols + j]);
    return std::sqrt(s);
  };
  const T pg = fro(w1, r1, c1, H, Cin, false) + fro(w2, r2, c2, H, H, false);
  const T pp = fro(w1, r1, c1, H, Cin, true) + fro(w2, r2, c2, H, H, true);
  return task + lambda_g * pg + lambda_perp * pp;
}

}  // namespace support

#endif  // EQUIPROJ_TESTS_SUPPORT_HPP
