#ifndef EQUIPROJ_REYNOLDS_HPP
#define EQUIPROJ_REYNOLDS_HPP

// Spatial-domain projection onto equivariant operators: the group average
//   P(W) = (1/|G|) sum_g rho_out(g)^* W rho_in(g),
// an independent commutant-basis construction of the same projector, and the
// C4 steerable-kernel specialisation.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "equiproj/errors.hpp"
#include "equiproj/group.hpp"
#include "equiproj/linalg.hpp"

namespace equiproj {

/// A linear map W between two representations of the same group.
class LinearLayerSpec {
 public:
  LinearLayerSpec(ComplexMatrix weight, Representation rep_in, Representation rep_out)
      : weight_(std::move(weight)), rep_in_(std::move(rep_in)), rep_out_(std::move(rep_out)) {
    if (!same_group(rep_in_.group(), rep_out_.group()))
      throw InvalidArgument("LinearLayerSpec: input and output representations differ in group");
    if (weight_.rows() != rep_out_.dim() || weight_.cols() != rep_in_.dim())
      throw InvalidArgument("LinearLayerSpec: weight is " + std::to_string(weight_.rows()) + "x" +
                            std::to_string(weight_.cols()) + " but representations need " +
                            std::to_string(rep_out_.dim()) + "x" + std::to_string(rep_in_.dim()));
  }

  const ComplexMatrix& weight() const noexcept { return weight_; }
  const Representation& rep_in() const noexcept { return rep_in_; }
  const Representation& rep_out() const noexcept { return rep_out_; }
  const GroupPtr& group() const noexcept { return rep_in_.group(); }

  LinearLayerSpec with_weight(ComplexMatrix w) const { return {std::move(w), rep_in_, rep_out_}; }

 private:
  ComplexMatrix weight_;
  Representation rep_in_;
  Representation rep_out_;
};

namespace detail {

/// Sum of term(lo) .. term(hi-1) with a fixed balanced pairing, so the
/// rounding pattern does not depend on evaluation order.
inline ComplexMatrix tree_sum(std::size_t lo, std::size_t hi,
                              const std::function<ComplexMatrix(std::size_t)>& term) {
  if (hi - lo == 1) return term(lo);
  const std::size_t mid = lo + (hi - lo) / 2;
  ComplexMatrix left = tree_sum(lo, mid, term);
  left += tree_sum(mid, hi, term);
  return left;
}

}  // namespace detail

/// Group average of rep_out(g)^* W rep_in(g) with the uniform measure.
inline ComplexMatrix project_finite(const LinearLayerSpec& layer) {
  const auto& w = layer.weight();
  if (!all_finite(w)) throw InvalidArgument("project_finite: non-finite weight");
  const std::size_t n = layer.group()->order();
  ComplexMatrix sum = detail::tree_sum(0, n, [&](std::size_t g) {
    return matmul(matmul(conj_transpose(layer.rep_out()[g]), w), layer.rep_in()[g]);
  });
  sum *= Complex(1.0 / static_cast<double>(n), 0.0);
  return sum;
}

struct OrbitDecomposition {
  ComplexMatrix equivariant;
  ComplexMatrix anti;
};

/// (P(W), W - P(W)).
inline OrbitDecomposition orbit_decompose(const LinearLayerSpec& layer) {
  ComplexMatrix eq = project_finite(layer);
  ComplexMatrix anti = layer.weight() - eq;
  return {std::move(eq), std::move(anti)};
}

inline constexpr std::size_t kCommutantCap = 4096;

/// Orthogonal projection of vec(W) onto the null space of the stacked
/// constraints rho_out(g) X - X rho_in(g) = 0. The null-space basis comes from
/// modified Gram-Schmidt: first over the (conjugated) constraint rows, then
/// completing with the standard basis. Independent of project_finite.
inline ComplexMatrix commutant_oracle(const LinearLayerSpec& layer) {
  const std::size_t dout = layer.rep_out().dim(), din = layer.rep_in().dim();
  const std::size_t n = dout * din;
  if (n > kCommutantCap)
    throw CapacityError("commutant_oracle: " + std::to_string(n) + " unknowns exceed cap of " +
                        std::to_string(kCommutantCap));
  constexpr double kDrop = 1e-10;

  std::vector<std::vector<Complex>> basis;  // orthonormal, spans conj(row space)
  auto orthogonalise = [&](std::vector<Complex>& v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        Complex c{};
        for (std::size_t i = 0; i < n; ++i) c += std::conj(b[i]) * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * b[i];
      }
  };
  auto try_add = [&](std::vector<Complex> v, double ref) {
    orthogonalise(v);
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    s = std::sqrt(s);
    if (s < kDrop * std::max(1.0, ref)) return false;
    for (auto& z : v) z /= s;
    basis.push_back(std::move(v));
    return true;
  };

  // Row (i,j),(k,l) of the constraint for g, with vec index a*din + b:
  //   [rho_out(g) X]_{ij} = sum_k rho_out(g)_{ik} X_{kj}
  //   [X rho_in(g)]_{ij}  = sum_l X_{il} rho_in(g)_{lj}
  for (Element g = 0; g < layer.group()->order(); ++g) {
    const auto& ro = layer.rep_out()[g];
    const auto& ri = layer.rep_in()[g];
    for (std::size_t i = 0; i < dout; ++i)
      for (std::size_t j = 0; j < din; ++j) {
        std::vector<Complex> row(n);
        for (std::size_t k = 0; k < dout; ++k) row[k * din + j] += ro(i, k);
        for (std::size_t l = 0; l < din; ++l) row[i * din + l] -= ri(l, j);
        double ref = 0.0;
        for (auto& z : row) {
          z = std::conj(z);
          ref += std::norm(z);
        }
        try_add(std::move(row), std::sqrt(ref));
      }
  }
  const std::size_t row_rank = basis.size();
  for (std::size_t e = 0; e < n && basis.size() < n; ++e) {
    std::vector<Complex> unit(n);
    unit[e] = 1.0;
    try_add(std::move(unit), 1.0);
  }

  const auto& w = layer.weight();
  std::vector<Complex> out(n);
  for (std::size_t b = row_rank; b < basis.size(); ++b) {
    Complex c{};
    for (std::size_t i = 0; i < n; ++i) c += w.data()[i] * std::conj(basis[b][i]);
    for (std::size_t i = 0; i < n; ++i) out[i] += c * basis[b][i];
  }
  return ComplexMatrix(dout, din, std::move(out));
}

// ---------------------------------------------------------------------------
// C4 steerable kernels

/// Real kernel of shape [c_out, c_in, 4, 4, s, s]; axes are output channel,
/// input channel, output orientation, input orientation, row, column.
class SteerableKernel {
 public:
  static constexpr std::size_t kOrientations = 4;

  SteerableKernel(std::size_t c_out, std::size_t c_in, std::size_t size)
      : SteerableKernel(c_out, c_in, size, std::vector<double>(c_out * c_in * 16 * size * size)) {}

  SteerableKernel(std::size_t c_out, std::size_t c_in, std::size_t size, std::vector<double> values)
      : c_out_(c_out), c_in_(c_in), size_(size), values_(std::move(values)) {
    if (c_out_ == 0 || c_in_ == 0) throw InvalidArgument("SteerableKernel: channel counts must be positive");
    if (size_ % 2 == 0) throw InvalidArgument("SteerableKernel: spatial size must be odd");
    if (values_.size() != c_out_ * c_in_ * 16 * size_ * size_)
      throw InvalidArgument("SteerableKernel: value count does not match shape");
    for (double v : values_)
      if (!std::isfinite(v)) throw InvalidArgument("SteerableKernel: non-finite value");
  }

  std::size_t c_out() const noexcept { return c_out_; }
  std::size_t c_in() const noexcept { return c_in_; }
  std::size_t size() const noexcept { return size_; }
  std::array<std::size_t, 6> shape() const { return {c_out_, c_in_, 4, 4, size_, size_}; }

  std::size_t index(std::size_t p, std::size_t q, std::size_t a, std::size_t b, std::size_t i,
                    std::size_t j) const {
    return ((((p * c_in_ + q) * 4 + a) * 4 + b) * size_ + i) * size_ + j;
  }
  double& operator()(std::size_t p, std::size_t q, std::size_t a, std::size_t b, std::size_t i,
                     std::size_t j) {
    return values_[index(p, q, a, b, i, j)];
  }
  double operator()(std::size_t p, std::size_t q, std::size_t a, std::size_t b, std::size_t i,
                    std::size_t j) const {
    return values_[index(p, q, a, b, i, j)];
  }

  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  friend bool operator==(const SteerableKernel&, const SteerableKernel&) = default;

 private:
  std::size_t c_out_;
  std::size_t c_in_;
  std::size_t size_;
  std::vector<double> values_;
};

/// Where a 90-degree rotation (applied r times) sends spatial index (i, j)
/// of an s x s grid; one step is (i, j) -> (j, s-1-i).
inline std::pair<std::size_t, std::size_t> rotate_index(std::size_t i, std::size_t j, std::size_t s,
                                                        int r) {
  r = ((r % 4) + 4) % 4;
  for (int t = 0; t < r; ++t) {
    const std::size_t ni = j, nj = s - 1 - i;
    i = ni;
    j = nj;
  }
  return {i, j};
}

inline SteerableKernel rot90_kernel(const SteerableKernel& k, int r) {
  const std::size_t s = k.size();
  SteerableKernel out(k.c_out(), k.c_in(), s);
  for (std::size_t p = 0; p < k.c_out(); ++p)
    for (std::size_t q = 0; q < k.c_in(); ++q)
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
          for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) {
              const auto [ri, rj] = rotate_index(i, j, s, r);
              out(p, q, a, b, ri, rj) = k(p, q, a, b, i, j);
            }
  return out;
}

/// Group-average form: P(K) = 1/4 sum_r S^r (rot_r K) S^-r applied to the
/// orientation axes of every (p, q) block, where (S X S^-1)[a][b] = X[a-1][b-1].
inline SteerableKernel project_c4_kernel(const SteerableKernel& k) {
  const std::size_t s = k.size();
  std::vector<double> acc(k.values().size(), 0.0);
  for (int r = 0; r < 4; ++r) {
    const SteerableKernel rk = rot90_kernel(k, r);
    for (std::size_t p = 0; p < k.c_out(); ++p)
      for (std::size_t q = 0; q < k.c_in(); ++q)
        for (std::size_t a = 0; a < 4; ++a)
          for (std::size_t b = 0; b < 4; ++b) {
            const std::size_t sa = (a + 4 - r) % 4, sb = (b + 4 - r) % 4;
            for (std::size_t i = 0; i < s; ++i)
              for (std::size_t j = 0; j < s; ++j)
                acc[k.index(p, q, a, b, i, j)] += rk(p, q, sa, sb, i, j);
          }
  }
  for (auto& v : acc) v *= 0.25;
  return SteerableKernel(k.c_out(), k.c_in(), s, std::move(acc));
}

/// Index-wise form: [P(K)]_{p,a;q,b}[i,j] = 1/4 sum_r [rot_r K]_{p,a-r;q,b-r}[i,j].
inline SteerableKernel project_c4_kernel_indexwise(const SteerableKernel& k) {
  const std::size_t s = k.size();
  SteerableKernel out(k.c_out(), k.c_in(), s);
  for (std::size_t p = 0; p < k.c_out(); ++p)
    for (std::size_t q = 0; q < k.c_in(); ++q)
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
          for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) {
              double sum = 0.0;
              for (int r = 0; r < 4; ++r) {
                // [rot_r K](i, j) = K(rot_r^-1 (i, j))
                const auto [si, sj] = rotate_index(i, j, s, -r);
                sum += k(p, q, (a + 4 - r) % 4, (b + 4 - r) % 4, si, sj);
              }
              out(p, q, a, b, i, j) = sum * 0.25;
            }
  return out;
}

/// Flattens K to a matrix with rows (p, a) and columns (q, b, i, j).
inline ComplexMatrix kernel_to_matrix(const SteerableKernel& k) {
  const std::size_t s = k.size();
  ComplexMatrix m(k.c_out() * 4, k.c_in() * 4 * s * s);
  for (std::size_t p = 0; p < k.c_out(); ++p)
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t q = 0; q < k.c_in(); ++q)
        for (std::size_t b = 0; b < 4; ++b)
          for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
              m(p * 4 + a, ((q * 4 + b) * s + i) * s + j) = k(p, q, a, b, i, j);
  return m;
}

/// Inverse of kernel_to_matrix; imaginary parts are discarded.
inline SteerableKernel kernel_from_matrix(const ComplexMatrix& m, std::size_t c_out, std::size_t c_in,
                                          std::size_t s) {
  if (m.rows() != c_out * 4 || m.cols() != c_in * 4 * s * s)
    throw InvalidArgument("kernel_from_matrix: shape mismatch");
  SteerableKernel k(c_out, c_in, s);
  for (std::size_t p = 0; p < c_out; ++p)
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t q = 0; q < c_in; ++q)
        for (std::size_t b = 0; b < 4; ++b)
          for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
              k(p, q, a, b, i, j) = m(p * 4 + a, ((q * 4 + b) * s + i) * s + j).real();
  return k;
}

struct KernelRepresentations {
  Representation rep_in;   ///< I_{c_in} (x) S^r (x) spatial rotation
  Representation rep_out;  ///< I_{c_out} (x) S^r
};

/// Permutation representations of C4 under which project_finite on
/// kernel_to_matrix(K) reproduces project_c4_kernel(K).
inline KernelRepresentations c4_kernel_representations(const GroupPtr& c4, std::size_t c_out,
                                                       std::size_t c_in, std::size_t s) {
  if (c4->order() != 4 || *c4 != *make_cyclic(4))
    throw InvalidArgument("c4_kernel_representations: group must be C4");
  std::vector<ComplexMatrix> rin, rout;
  for (Element r = 0; r < 4; ++r) {
    ComplexMatrix shift(4, 4);
    for (std::size_t b = 0; b < 4; ++b) shift((b + r) % 4, b) = 1.0;
    // (Rot v)(x) = v(rot^-1 x): column x' maps to row rot(x').
    ComplexMatrix spatial(s * s, s * s);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j) {
        const auto [ri, rj] = rotate_index(i, j, s, static_cast<int>(r));
        spatial(ri * s + rj, i * s + j) = 1.0;
      }
    rout.push_back(kron(ComplexMatrix::identity(c_out), shift));
    rin.push_back(kron(kron(ComplexMatrix::identity(c_in), shift), spatial));
  }
  return {Representation(c4, std::move(rin)), Representation(c4, std::move(rout))};
}

}  // namespace equiproj

#endif  // EQUIPROJ_REYNOLDS_HPP
