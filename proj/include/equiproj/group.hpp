#ifndef EQUIPROJ_GROUP_HPP
#define EQUIPROJ_GROUP_HPP

// Finite groups as explicit Cayley tables and their unitary representations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "equiproj/errors.hpp"
#include "equiproj/linalg.hpp"

namespace equiproj {

using Element = std::size_t;

class FiniteGroup {
 public:
  /// Validates the table. Associativity is checked exhaustively for n <= 64.
  FiniteGroup(std::string name, std::vector<std::vector<Element>> cayley)
      : name_(std::move(name)), cayley_(std::move(cayley)) {
    const std::size_t n = cayley_.size();
    if (n == 0) throw InvalidArgument("FiniteGroup: empty table");
    for (const auto& row : cayley_) {
      if (row.size() != n) throw InvalidArgument("FiniteGroup: table is not square");
      for (Element e : row)
        if (e >= n) throw InvalidArgument("FiniteGroup: element index out of range");
    }
    bool found = false;
    for (Element e = 0; e < n && !found; ++e) {
      bool ok = true;
      for (Element g = 0; g < n && ok; ++g) ok = cayley_[e][g] == g && cayley_[g][e] == g;
      if (ok) {
        identity_ = e;
        found = true;
      }
    }
    if (!found) throw InvalidArgument("FiniteGroup: no identity element");
    inverse_.assign(n, n);
    for (Element g = 0; g < n; ++g)
      for (Element h = 0; h < n; ++h)
        if (cayley_[g][h] == identity_ && cayley_[h][g] == identity_) inverse_[g] = h;
    for (Element g = 0; g < n; ++g)
      if (inverse_[g] == n) throw InvalidArgument("FiniteGroup: element without inverse");
    if (n <= 64) {
      for (Element a = 0; a < n; ++a)
        for (Element b = 0; b < n; ++b)
          for (Element c = 0; c < n; ++c)
            if (cayley_[cayley_[a][b]][c] != cayley_[a][cayley_[b][c]])
              throw InvalidArgument("FiniteGroup: table is not associative");
    }
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t order() const noexcept { return cayley_.size(); }
  Element identity() const noexcept { return identity_; }
  Element mul(Element g, Element h) const { return cayley_[g][h]; }
  Element inverse(Element g) const { return inverse_[g]; }
  const std::vector<std::vector<Element>>& cayley() const noexcept { return cayley_; }

  friend bool operator==(const FiniteGroup& a, const FiniteGroup& b) {
    return a.cayley_ == b.cayley_;
  }

 private:
  std::string name_;
  std::vector<std::vector<Element>> cayley_;
  std::vector<Element> inverse_;
  Element identity_ = 0;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

inline bool same_group(const GroupPtr& a, const GroupPtr& b) {
  return a == b || (a && b && *a == *b);
}

/// Z/nZ with g*h = (g+h) mod n.
inline GroupPtr make_cyclic(std::size_t n) {
  if (n == 0) throw InvalidArgument("make_cyclic: n must be positive");
  std::vector<std::vector<Element>> t(n, std::vector<Element>(n));
  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h) t[g][h] = (g + h) % n;
  return std::make_shared<const FiniteGroup>("C" + std::to_string(n), std::move(t));
}

/// Dihedral group of order 2n. Index k < n is r^k, index n + k is s r^k,
/// with s r s = r^-1.
inline GroupPtr make_dihedral(std::size_t n) {
  if (n == 0) throw InvalidArgument("make_dihedral: n must be positive");
  const std::size_t order = 2 * n;
  std::vector<std::vector<Element>> t(order, std::vector<Element>(order));
  for (Element x = 0; x < order; ++x) {
    const bool xs = x >= n;
    const std::size_t a = x % n;
    for (Element y = 0; y < order; ++y) {
      const bool ys = y >= n;
      const std::size_t b = y % n;
      // (s^xs r^a)(s^ys r^b) = s^(xs+ys) r^(b + (ys ? -a : a))
      const std::size_t k = ys ? (b + n - a) % n : (a + b) % n;
      t[x][y] = (xs != ys) ? n + k : k;
    }
  }
  return std::make_shared<const FiniteGroup>("D" + std::to_string(n), std::move(t));
}

// ---------------------------------------------------------------------------

inline constexpr double kRepresentationTolerance = 1e-12;

class Representation {
 public:
  struct Unchecked {};

  /// Validates homomorphism, unitarity and identity-to-I eagerly.
  Representation(GroupPtr group, std::vector<ComplexMatrix> matrices)
      : Representation(std::move(group), std::move(matrices), Unchecked{}) {
    validate();
  }

  /// Skips validation. For benchmarks that construct large representations.
  Representation(GroupPtr group, std::vector<ComplexMatrix> matrices, Unchecked)
      : group_(std::move(group)), matrices_(std::move(matrices)) {
    if (!group_) throw InvalidArgument("Representation: null group");
    if (matrices_.size() != group_->order())
      throw InvalidArgument("Representation: need one matrix per group element");
    dim_ = matrices_.front().rows();
    if (dim_ == 0) throw InvalidArgument("Representation: dimension must be positive");
    for (const auto& m : matrices_)
      if (m.rows() != dim_ || m.cols() != dim_)
        throw InvalidArgument("Representation: matrices must be square of a common size");
  }

  const GroupPtr& group() const noexcept { return group_; }
  std::size_t dim() const noexcept { return dim_; }
  const ComplexMatrix& operator[](Element g) const { return matrices_[g]; }
  const std::vector<ComplexMatrix>& matrices() const noexcept { return matrices_; }

  Complex character(Element g) const {
    Complex s{};
    for (std::size_t i = 0; i < dim_; ++i) s += matrices_[g](i, i);
    return s;
  }

  /// True when every matrix is a real 0/1 permutation matrix.
  bool is_permutation() const {
    for (const auto& m : matrices_) {
      for (std::size_t i = 0; i < dim_; ++i) {
        int ones = 0;
        for (std::size_t j = 0; j < dim_; ++j) {
          const Complex z = m(i, j);
          if (z == Complex(1.0, 0.0)) ++ones;
          else if (z != Complex{}) return false;
        }
        if (ones != 1) return false;
      }
    }
    return true;
  }

 private:
  void validate() const {
    const auto& g = *group_;
    const ComplexMatrix id = ComplexMatrix::identity(dim_);
    if (!(matrices_[g.identity()] == id))
      throw InvalidArgument("Representation: identity element must map to I exactly");
    for (Element a = 0; a < g.order(); ++a) {
      if (!all_finite(matrices_[a])) throw InvalidArgument("Representation: non-finite entry");
      const ComplexMatrix uu = matmul(matrices_[a], conj_transpose(matrices_[a]));
      if (max_abs_diff(uu, id) > kRepresentationTolerance)
        throw InvalidArgument("Representation: matrix for element " + std::to_string(a) +
                              " is not unitary");
    }
    for (Element a = 0; a < g.order(); ++a)
      for (Element b = 0; b < g.order(); ++b) {
        const ComplexMatrix prod = matmul(matrices_[a], matrices_[b]);
        if (max_abs_diff(prod, matrices_[g.mul(a, b)]) > kRepresentationTolerance)
          throw InvalidArgument("Representation: homomorphism fails for pair (" +
                                std::to_string(a) + ", " + std::to_string(b) + ")");
      }
  }

  GroupPtr group_;
  std::vector<ComplexMatrix> matrices_;
  std::size_t dim_ = 0;
};

inline Representation trivial_representation(const GroupPtr& g) {
  return Representation(g, std::vector<ComplexMatrix>(g->order(), ComplexMatrix::identity(1)));
}

/// Left regular representation: matrices[g][x][y] = 1 iff x = g y.
inline Representation regular_representation(const GroupPtr& g) {
  const std::size_t n = g->order();
  std::vector<ComplexMatrix> ms;
  ms.reserve(n);
  for (Element a = 0; a < n; ++a) {
    ComplexMatrix m(n, n);
    for (Element y = 0; y < n; ++y) m(g->mul(a, y), y) = 1.0;
    ms.push_back(std::move(m));
  }
  return Representation(g, std::move(ms));
}

inline Representation tensor_representation(const Representation& a, const Representation& b) {
  if (!same_group(a.group(), b.group()))
    throw InvalidArgument("tensor_representation: representations live on different groups");
  std::vector<ComplexMatrix> ms;
  ms.reserve(a.group()->order());
  for (Element g = 0; g < a.group()->order(); ++g) ms.push_back(kron(a[g], b[g]));
  return Representation(a.group(), std::move(ms));
}

inline Representation conjugate_representation(const Representation& a) {
  std::vector<ComplexMatrix> ms;
  ms.reserve(a.group()->order());
  for (const auto& m : a.matrices()) ms.push_back(conj(m));
  return Representation(a.group(), std::move(ms));
}

/// Block-diagonal direct sum, blocks in argument order.
inline Representation direct_sum(const std::vector<Representation>& parts) {
  if (parts.empty()) throw InvalidArgument("direct_sum: no summands");
  const GroupPtr& grp = parts.front().group();
  std::size_t dim = 0;
  for (const auto& p : parts) {
    if (!same_group(p.group(), grp))
      throw InvalidArgument("direct_sum: representations live on different groups");
    dim += p.dim();
  }
  std::vector<ComplexMatrix> ms;
  for (Element g = 0; g < grp->order(); ++g) {
    ComplexMatrix m(dim, dim);
    std::size_t off = 0;
    for (const auto& p : parts) {
      for (std::size_t i = 0; i < p.dim(); ++i)
        for (std::size_t j = 0; j < p.dim(); ++j) m(off + i, off + j) = p[g](i, j);
      off += p.dim();
    }
    ms.push_back(std::move(m));
  }
  return Representation(grp, std::move(ms));
}

/// u * rho(g) * u^*. The identity element is pinned to I exactly.
inline Representation change_of_basis(const Representation& a, const ComplexMatrix& u) {
  if (u.rows() != a.dim() || u.cols() != a.dim())
    throw InvalidArgument("change_of_basis: unitary has the wrong size");
  const ComplexMatrix uh = conj_transpose(u);
  std::vector<ComplexMatrix> ms;
  for (Element g = 0; g < a.group()->order(); ++g) {
    if (g == a.group()->identity()) ms.push_back(ComplexMatrix::identity(a.dim()));
    else ms.push_back(matmul(matmul(u, a[g]), uh));
  }
  return Representation(a.group(), std::move(ms));
}

/// The two-dimensional representation of D_n by rotations and reflections
/// of the plane.
inline Representation dihedral_standard_representation(const GroupPtr& g) {
  const std::size_t n = g->order() / 2;
  if (n == 0 || *g != *make_dihedral(n))
    throw InvalidArgument("dihedral_standard_representation: group is not dihedral");
  std::vector<ComplexMatrix> ms;
  for (Element x = 0; x < 2 * n; ++x) {
    const std::size_t k = x % n;
    ComplexMatrix rot(2, 2);
    if (k == 0) {
      rot = ComplexMatrix::identity(2);
    } else {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      rot = ComplexMatrix{{std::cos(t), -std::sin(t)}, {std::sin(t), std::cos(t)}};
    }
    if (x >= n) rot = matmul(ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}, rot);
    ms.push_back(std::move(rot));
  }
  return Representation(g, std::move(ms));
}

// ---------------------------------------------------------------------------

struct LabelledIrrep {
  int label;
  Representation rep;
};

class IrrepCatalogue {
 public:
  /// Irreps are stored sorted by label. With check_completeness, the
  /// dimension count and character orthonormality are verified.
  IrrepCatalogue(GroupPtr group, std::vector<LabelledIrrep> irreps, bool check_completeness)
      : group_(std::move(group)), irreps_(std::move(irreps)) {
    for (const auto& ir : irreps_)
      if (!same_group(ir.rep.group(), group_))
        throw InvalidArgument("IrrepCatalogue: irrep lives on a different group");
    std::sort(irreps_.begin(), irreps_.end(),
              [](const LabelledIrrep& a, const LabelledIrrep& b) { return a.label < b.label; });
    if (check_completeness) {
      std::size_t count = 0;
      for (const auto& ir : irreps_) count += ir.rep.dim() * ir.rep.dim();
      if (count != group_->order())
        throw InvalidArgument("IrrepCatalogue: dimension count does not match group order");
      const double gram_err = max_abs_diff(character_gram(), ComplexMatrix::identity(irreps_.size()));
      if (gram_err >= 1e-10)
        throw InvalidArgument("IrrepCatalogue: characters are not orthonormal");
      complete_ = true;
    }
  }

  const GroupPtr& group() const noexcept { return group_; }
  std::size_t size() const noexcept { return irreps_.size(); }
  const LabelledIrrep& operator[](std::size_t i) const { return irreps_[i]; }
  const std::vector<LabelledIrrep>& irreps() const noexcept { return irreps_; }
  bool completeness_checked() const noexcept { return complete_; }

  /// Position of the trivial representation, or size() if absent.
  std::size_t trivial_index() const {
    for (std::size_t i = 0; i < irreps_.size(); ++i) {
      const auto& r = irreps_[i].rep;
      if (r.dim() != 1) continue;
      bool triv = true;
      for (const auto& m : r.matrices()) triv = triv && m(0, 0) == Complex(1.0, 0.0);
      if (triv) return i;
    }
    return irreps_.size();
  }

  /// <chi_a, chi_b> = (1/|G|) sum_g chi_a(g) conj(chi_b(g)).
  ComplexMatrix character_gram() const {
    const std::size_t k = irreps_.size();
    ComplexMatrix gram(k, k);
    const double inv = 1.0 / static_cast<double>(group_->order());
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        Complex s{};
        for (Element g = 0; g < group_->order(); ++g)
          s += irreps_[a].rep.character(g) * std::conj(irreps_[b].rep.character(g));
        gram(a, b) = s * inv;
      }
    return gram;
  }

 private:
  GroupPtr group_;
  std::vector<LabelledIrrep> irreps_;
  bool complete_ = false;
};

/// pi_k(g) = exp(2 pi i k g / n); the exponent is reduced mod n first.
inline Representation cyclic_irrep(const GroupPtr& g, std::size_t k) {
  const std::size_t n = g->order();
  std::vector<ComplexMatrix> ms;
  ms.reserve(n);
  for (Element x = 0; x < n; ++x) {
    const std::size_t e = (k % n) * x % n;
    Complex z(1.0, 0.0);
    if (e != 0) {
      // Exact values at quarter turns keep small groups free of rounding.
      if (4 * e == n) z = Complex(0.0, 1.0);
      else if (2 * e == n) z = Complex(-1.0, 0.0);
      else if (4 * e == 3 * n) z = Complex(0.0, -1.0);
      else z = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(n));
    }
    ms.push_back(ComplexMatrix{{z}});
  }
  return Representation(g, std::move(ms));
}

inline IrrepCatalogue cyclic_irreps(const GroupPtr& g) {
  std::vector<LabelledIrrep> irreps;
  for (std::size_t k = 0; k < g->order(); ++k)
    irreps.push_back({static_cast<int>(k), cyclic_irrep(g, k)});
  return IrrepCatalogue(g, std::move(irreps), true);
}

inline IrrepCatalogue cyclic_irreps(std::size_t n) { return cyclic_irreps(make_cyclic(n)); }

}  // namespace equiproj

#endif  // EQUIPROJ_GROUP_HPP
