#ifndef EQUIPROJ_LINALG_HPP
#define EQUIPROJ_LINALG_HPP

// Dense complex matrices, the norm family used by the regulariser, and the
// Hilbert-Schmidt inner product.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "equiproj/errors.hpp"

namespace equiproj {

using Complex = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw InvalidArgument("ComplexMatrix: entry count does not match shape");
    }
  }
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InvalidArgument("ComplexMatrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool same_shape(const ComplexMatrix& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<Complex>& data() noexcept { return data_; }
  const std::vector<Complex>& data() const noexcept { return data_; }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o, "operator+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o, "operator-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexMatrix& operator*=(Complex s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  void require_same_shape(const ComplexMatrix& o, const char* where) const {
    if (!same_shape(o)) throw InvalidArgument(std::string(where) + ": shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

inline bool all_finite(const ComplexMatrix& a) {
  return std::all_of(a.data().begin(), a.data().end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("matmul: inner dimensions differ");
  ComplexMatrix c(a.rows(), b.cols());
  const std::size_t n = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex* crow = &c(i, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      const Complex* brow = &b(k, 0);
      for (std::size_t j = 0; j < m; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

inline ComplexMatrix conj_transpose(const ComplexMatrix& a) {
  ComplexMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

inline ComplexMatrix conj(const ComplexMatrix& a) {
  ComplexMatrix c = a;
  for (auto& z : c.data()) z = std::conj(z);
  return c;
}

inline ComplexMatrix transpose(const ComplexMatrix& a) {
  ComplexMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return k;
}

/// Sum of a[i][j] * conj(b[i][j]).
inline Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.same_shape(b)) throw InvalidArgument("hs_inner: shape mismatch");
  Complex s{};
  for (std::size_t k = 0; k < a.size(); ++k) s += a.data()[k] * std::conj(b.data()[k]);
  return s;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.same_shape(b)) throw InvalidArgument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

// ---------------------------------------------------------------------------
// Norms

class NormKind {
 public:
  enum class Tag { Spectral, Frobenius, EntryInfinity, Mixed };

  static NormKind spectral() { return NormKind(Tag::Spectral, 2, 2); }
  static NormKind frobenius() { return NormKind(Tag::Frobenius, 2, 2); }
  static NormKind entry_infinity() { return NormKind(Tag::EntryInfinity, 0, 0); }
  static NormKind mixed(int p, int q) {
    if (p < 1 || p > 3 || q < 1 || q > 3) {
      throw InvalidArgument("NormKind::mixed: p and q must lie in {1,2,3}");
    }
    return NormKind(Tag::Mixed, p, q);
  }

  /// Accepts "spectral", "frobenius", "inf" and "mixed:p,q".
  static NormKind parse(const std::string& s) {
    if (s == "spectral") return spectral();
    if (s == "frobenius") return frobenius();
    if (s == "inf" || s == "infinity" || s == "entry-infinity") return entry_infinity();
    if (s.rfind("mixed:", 0) == 0 && s.size() == 9 && s[7] == ',') {
      return mixed(s[6] - '0', s[8] - '0');
    }
    throw InvalidArgument("unknown norm kind '" + s + "'");
  }

  Tag tag() const noexcept { return tag_; }
  int p() const noexcept { return p_; }
  int q() const noexcept { return q_; }

  std::string to_string() const {
    switch (tag_) {
      case Tag::Spectral: return "spectral";
      case Tag::Frobenius: return "frobenius";
      case Tag::EntryInfinity: return "inf";
      case Tag::Mixed: return "mixed:" + std::to_string(p_) + "," + std::to_string(q_);
    }
    return "?";
  }

  friend bool operator==(const NormKind&, const NormKind&) = default;

 private:
  NormKind(Tag t, int p, int q) : tag_(t), p_(p), q_(q) {}
  Tag tag_;
  int p_;
  int q_;
};

inline constexpr std::size_t kPowerBlock = 4;

struct PowerIterationOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 10000;
};

/// Top singular triple: a * v = sigma * u with unit u, v.
struct SingularPair {
  double sigma = 0.0;
  std::vector<Complex> u;
  std::vector<Complex> v;
  std::size_t iterations = 0;
};

namespace detail {

inline double vec_norm(const std::vector<Complex>& x) {
  double s = 0.0;
  for (const auto& z : x) s += std::norm(z);
  return std::sqrt(s);
}

inline std::vector<Complex> apply(const ComplexMatrix& a, const std::vector<Complex>& x) {
  std::vector<Complex> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s{};
    const Complex* row = &a(i, 0);
    for (std::size_t j = 0; j < a.cols(); ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline std::vector<Complex> apply_adjoint(const ComplexMatrix& a, const std::vector<Complex>& y) {
  std::vector<Complex> x(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const Complex yi = y[i];
    const Complex* row = &a(i, 0);
    for (std::size_t j = 0; j < a.cols(); ++j) x[j] += std::conj(row[j]) * yi;
  }
  return x;
}

inline void require_finite(const ComplexMatrix& a, const char* where) {
  if (!all_finite(a)) throw InvalidArgument(std::string(where) + ": non-finite entry");
}

}  // namespace detail

namespace detail {

/// Cyclic Jacobi eigen-decomposition of a small Hermitian matrix; returns the
/// largest eigenvalue and a unit eigenvector.
inline std::pair<double, std::vector<Complex>> hermitian_top_eigen(ComplexMatrix h) {
  const std::size_t k = h.rows();
  ComplexMatrix vecs(k, k);
  for (std::size_t i = 0; i < k; ++i) vecs(i, i) = 1.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      diag += std::norm(h(i, i));
      for (std::size_t j = i + 1; j < k; ++j) off += std::norm(h(i, j));
    }
    if (off <= 1e-32 * diag) break;
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = p + 1; q < k; ++q) {
        const double mag = std::abs(h(p, q));
        if (mag == 0.0) continue;
        const Complex phase = h(p, q) / mag;
        const double theta = 0.5 * std::atan2(2.0 * mag, h(q, q).real() - h(p, p).real());
        const double c = std::cos(theta), sn = std::sin(theta);
        const Complex rpp = c, rqp = -sn * std::conj(phase), rpq = sn * phase, rqq = c;
        for (std::size_t i = 0; i < k; ++i) {
          const Complex hp = h(i, p), hq = h(i, q);
          h(i, p) = hp * rpp + hq * rqp;
          h(i, q) = hp * rpq + hq * rqq;
        }
        for (std::size_t j = 0; j < k; ++j) {
          const Complex hp = h(p, j), hq = h(q, j);
          h(p, j) = std::conj(rpp) * hp + std::conj(rqp) * hq;
          h(q, j) = std::conj(rpq) * hp + std::conj(rqq) * hq;
        }
        for (std::size_t i = 0; i < k; ++i) {
          const Complex vp = vecs(i, p), vq = vecs(i, q);
          vecs(i, p) = vp * rpp + vq * rqp;
          vecs(i, q) = vp * rpq + vq * rqq;
        }
      }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < k; ++i)
    if (h(i, i).real() > h(best, best).real()) best = i;
  std::vector<Complex> v(k);
  for (std::size_t i = 0; i < k; ++i) v[i] = vecs(i, best);
  return {h(best, best).real(), v};
}

/// Orthonormalises the columns of `block` in place (modified Gram-Schmidt).
/// A column that vanishes relative to `scale` is replaced by the next
/// standard basis vector.
inline void orthonormalise(std::vector<std::vector<Complex>>& block, double scale) {
  const std::size_t n = block.front().size();
  std::size_t fresh = 0;
  for (std::size_t c = 0; c < block.size(); ++c) {
    double threshold = 1e-13 * scale;
    for (;;) {
      for (std::size_t d = 0; d < c; ++d) {
        Complex ip{};
        for (std::size_t i = 0; i < n; ++i) ip += std::conj(block[d][i]) * block[c][i];
        for (std::size_t i = 0; i < n; ++i) block[c][i] -= ip * block[d][i];
      }
      const double nc = vec_norm(block[c]);
      if (nc > threshold) {
        for (auto& z : block[c]) z /= nc;
        break;
      }
      block[c].assign(n, Complex{});
      block[c][fresh++ % n] = 1.0;
      threshold = 1e-8;
    }
  }
}

}  // namespace detail

/// Largest singular value by block power iteration on a* a with a
/// Rayleigh-Ritz step, so near-equal leading singular values do not stall it.
/// The first start vector is the normalised all-ones vector with a small
/// index-based perturbation; further columns use other fixed perturbations.
inline SingularPair top_singular_pair(const ComplexMatrix& a, PowerIterationOptions opts = {}) {
  detail::require_finite(a, "top_singular_pair");
  SingularPair out;
  out.u.assign(a.rows(), Complex{});
  out.v.assign(a.cols(), Complex{});
  if (a.size() == 0) return out;
  const bool zero = std::all_of(a.data().begin(), a.data().end(),
                                [](const Complex& z) { return z == Complex{}; });
  if (zero) {
    out.u[0] = 1.0;
    out.v[0] = 1.0;
    return out;
  }

  const std::size_t n = a.cols();
  const std::size_t k = std::min<std::size_t>(n, kPowerBlock);
  std::vector<std::vector<Complex>> q(k, std::vector<Complex>(n));
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < n; ++j) {
      const double re = static_cast<double>((j * 7919 + 13 + 31 * c) % 101) / 101.0;
      const double im = static_cast<double>((j * 104729 + 7 + 17 * c) % 103) / 103.0;
      q[c][j] = c == 0 ? Complex(1.0 + 1e-3 * re, 1e-3 * im) : Complex(re - 0.5, im - 0.5);
    }
  detail::orthonormalise(q, 1.0);

  double lambda = 0.0;
  std::vector<std::vector<Complex>> aq(k);
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    for (std::size_t c = 0; c < k; ++c) aq[c] = detail::apply(a, q[c]);
    ComplexMatrix h(k, k);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < k; ++c) {
        Complex s{};
        for (std::size_t i = 0; i < aq[r].size(); ++i) s += std::conj(aq[r][i]) * aq[c][i];
        h(r, c) = s;
      }
    const auto [lambda_new, s] = detail::hermitian_top_eigen(h);
    const bool converged = it > 1 && std::abs(lambda_new - lambda) <= opts.tolerance * lambda_new;
    lambda = lambda_new;
    if (converged) {
      std::vector<Complex> v(n);
      for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < n; ++j) v[j] += s[c] * q[c][j];
      const double nv = detail::vec_norm(v);
      for (auto& z : v) z /= nv;
      std::vector<Complex> u = detail::apply(a, v);
      const double sigma = detail::vec_norm(u);
      for (auto& z : u) z /= sigma;
      out.sigma = sigma;
      out.u = std::move(u);
      out.v = std::move(v);
      out.iterations = it;
      return out;
    }
    double scale = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      q[c] = detail::apply_adjoint(a, aq[c]);
      scale = std::max(scale, detail::vec_norm(q[c]));
    }
    detail::orthonormalise(q, scale);
  }
  throw ConvergenceFailure("top_singular_pair: no convergence", opts.max_iterations);
}

inline double norm(const ComplexMatrix& a, const NormKind& kind) {
  detail::require_finite(a, "norm");
  switch (kind.tag()) {
    case NormKind::Tag::Spectral:
      return top_singular_pair(a).sigma;
    case NormKind::Tag::Frobenius: {
      double s = 0.0;
      for (const auto& z : a.data()) s += std::norm(z);
      return std::sqrt(s);
    }
    case NormKind::Tag::EntryInfinity: {
      double m = 0.0;
      for (const auto& z : a.data()) m = std::max(m, std::abs(z));
      return m;
    }
    case NormKind::Tag::Mixed: {
      const double p = kind.p(), q = kind.q();
      double outer = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) inner += std::pow(std::abs(a(i, j)), p);
        outer += std::pow(inner, q / p);
      }
      return std::pow(outer, 1.0 / q);
    }
  }
  return 0.0;
}

/// Gradient of norm(a, kind) with respect to the real and imaginary parts of
/// a, packed as d/dRe + i d/dIm. At non-differentiable points a fixed
/// subgradient is returned: zero at a = 0, the first maximal entry in
/// row-major order for EntryInfinity, the power-iteration pair for Spectral.
inline ComplexMatrix norm_gradient(const ComplexMatrix& a, const NormKind& kind) {
  detail::require_finite(a, "norm_gradient");
  ComplexMatrix g(a.rows(), a.cols());
  const auto phase = [](Complex z) { return z == Complex{} ? Complex{} : z / std::abs(z); };
  switch (kind.tag()) {
    case NormKind::Tag::Spectral: {
      const SingularPair sp = top_singular_pair(a);
      if (sp.sigma == 0.0) return g;
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) g(i, j) = sp.u[i] * std::conj(sp.v[j]);
      return g;
    }
    case NormKind::Tag::Frobenius: {
      const double n = norm(a, kind);
      if (n == 0.0) return g;
      for (std::size_t k = 0; k < a.size(); ++k) g.data()[k] = a.data()[k] / n;
      return g;
    }
    case NormKind::Tag::EntryInfinity: {
      std::size_t best = 0;
      double m = -1.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double v = std::abs(a.data()[k]);
        if (v > m) {
          m = v;
          best = k;
        }
      }
      if (m > 0.0) g.data()[best] = phase(a.data()[best]);
      return g;
    }
    case NormKind::Tag::Mixed: {
      const double p = kind.p(), q = kind.q();
      const double total = norm(a, kind);
      if (total == 0.0) return g;
      for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::pow(std::abs(a(i, j)), p);
        const double row = std::pow(s, 1.0 / p);
        if (row == 0.0) continue;
        const double d_row = std::pow(row / total, q - 1.0);
        for (std::size_t j = 0; j < a.cols(); ++j) {
          const double mag = std::abs(a(i, j));
          if (mag == 0.0) continue;
          g(i, j) = d_row * std::pow(mag / row, p - 1.0) * phase(a(i, j));
        }
      }
      return g;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Least squares

struct LeastSquaresResult {
  ComplexMatrix solution;
  double residual = 0.0;  ///< Frobenius norm of a * solution - b
};

/// Minimises ||a x - b||_F by modified Gram-Schmidt QR with one
/// re-orthogonalisation pass. Columns whose orthogonal remainder falls below
/// 1e-10 times the largest column norm count as dependent.
inline LeastSquaresResult solve_least_squares(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) throw InvalidArgument("solve_least_squares: row counts differ");
  if (a.rows() < a.cols()) throw InvalidArgument("solve_least_squares: system is underdetermined");
  detail::require_finite(a, "solve_least_squares");
  detail::require_finite(b, "solve_least_squares");
  const std::size_t m = a.rows(), n = a.cols();

  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += std::norm(a(i, j));
    scale = std::max(scale, std::sqrt(s));
  }

  ComplexMatrix q(m, n), r(n, n);
  std::size_t rank = 0;
  bool deficient = false;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Complex> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = a(i, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex c{};
        for (std::size_t i = 0; i < m; ++i) c += std::conj(q(i, k)) * v[i];
        r(k, j) += c;
        for (std::size_t i = 0; i < m; ++i) v[i] -= c * q(i, k);
      }
    }
    const double nv = detail::vec_norm(v);
    if (nv <= 1e-10 * scale || scale == 0.0) {
      deficient = true;
      continue;
    }
    ++rank;
    r(j, j) = nv;
    for (std::size_t i = 0; i < m; ++i) q(i, j) = v[i] / nv;
  }
  if (deficient) {
    throw RankDeficiency("solve_least_squares: matrix is rank deficient (numerical rank " +
                             std::to_string(rank) + " of " + std::to_string(n) + ")",
                         rank);
  }

  ComplexMatrix qtb = matmul(conj_transpose(q), b);
  ComplexMatrix x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t ii = n; ii-- > 0;) {
      Complex s = qtb(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= r(ii, k) * x(k, c);
      x(ii, c) = s / r(ii, ii);
    }
  }
  LeastSquaresResult out;
  out.residual = norm(matmul(a, x) - b, NormKind::frobenius());
  out.solution = std::move(x);
  return out;
}

}  // namespace equiproj

#endif  // EQUIPROJ_LINALG_HPP
