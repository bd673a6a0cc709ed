#ifndef EQUIPROJ_SPECTRAL_HPP
#define EQUIPROJ_SPECTRAL_HPP

// Fourier-domain projections.
//
// Conventions:
//   f^(pi) = (1/|G|) sum_g f(g) pi(g)^*,   f(g) = sum_pi d_pi tr(f^(pi) pi(g)).
// Under this transform the left regular action f -> f(g^-1 .) becomes
// f^(pi) -> f^(pi) pi(g)^*, so the column index of f^(pi) carries the action
// (through conj(pi)) and the row index is a multiplicity index. Operators on
// L2(G, V) are rewritten in the unitary Peter-Weyl basis with coordinates
// (pi, b, a, v): b the acted index (slowest), a the multiplicity index, v the
// fiber index (fastest). On the pi segment the group acts by
// conj(pi(g)) (x) I (x) rho(g).

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "equiproj/errors.hpp"
#include "equiproj/fft.hpp"
#include "equiproj/group.hpp"
#include "equiproj/linalg.hpp"
#include "equiproj/reynolds.hpp"

namespace equiproj {

struct GroupFunction {
  GroupPtr group;
  std::vector<Complex> values;  ///< f(g) indexed by element

  GroupFunction(GroupPtr g, std::vector<Complex> v) : group(std::move(g)), values(std::move(v)) {
    if (!group) throw InvalidArgument("GroupFunction: null group");
    if (values.size() != group->order())
      throw InvalidArgument("GroupFunction: need one value per group element");
    for (const auto& z : values)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvalidArgument("GroupFunction: non-finite value");
  }
};

struct FourierBlocks {
  IrrepCatalogue catalogue;
  std::vector<ComplexMatrix> blocks;  ///< one d_pi x d_pi block per catalogue entry
};

inline FourierBlocks fourier_transform(const GroupFunction& f, const IrrepCatalogue& cat) {
  if (!same_group(f.group, cat.group()))
    throw InvalidArgument("fourier_transform: function and catalogue live on different groups");
  const double inv = 1.0 / static_cast<double>(f.group->order());
  FourierBlocks out{cat, {}};
  for (const auto& ir : cat.irreps()) {
    const std::size_t d = ir.rep.dim();
    ComplexMatrix blk(d, d);
    for (Element g = 0; g < f.group->order(); ++g) {
      const Complex fg = f.values[g];
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) blk(i, j) += fg * std::conj(ir.rep[g](j, i));
    }
    blk *= Complex(inv, 0.0);
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

inline GroupFunction inverse_fourier_transform(const FourierBlocks& fb) {
  const auto& cat = fb.catalogue;
  if (!cat.completeness_checked())
    throw InvalidArgument("inverse_fourier_transform: catalogue is not known to be complete");
  if (fb.blocks.size() != cat.size())
    throw InvalidArgument("inverse_fourier_transform: block count does not match catalogue");
  const auto& grp = cat.group();
  std::vector<Complex> vals(grp->order());
  for (Element g = 0; g < grp->order(); ++g) {
    Complex s{};
    for (std::size_t k = 0; k < cat.size(); ++k) {
      const auto& pi = cat[k].rep;
      const auto& blk = fb.blocks[k];
      if (blk.rows() != pi.dim() || blk.cols() != pi.dim())
        throw InvalidArgument("inverse_fourier_transform: block shape does not match irrep");
      Complex tr{};
      for (std::size_t i = 0; i < pi.dim(); ++i)
        for (std::size_t j = 0; j < pi.dim(); ++j) tr += blk(i, j) * pi[g](j, i);
      s += static_cast<double>(pi.dim()) * tr;
    }
    vals[g] = s;
  }
  return GroupFunction(grp, std::move(vals));
}

/// Keeps only the trivial-representation block and transforms back.
inline GroupFunction project_invariant(const GroupFunction& f, const IrrepCatalogue& cat) {
  const std::size_t triv = cat.trivial_index();
  if (triv == cat.size()) throw InvalidArgument("project_invariant: catalogue lacks the trivial irrep");
  FourierBlocks fb = fourier_transform(f, cat);
  for (std::size_t k = 0; k < fb.blocks.size(); ++k)
    if (k != triv) fb.blocks[k] = ComplexMatrix(fb.blocks[k].rows(), fb.blocks[k].cols());
  return inverse_fourier_transform(fb);
}

// ---------------------------------------------------------------------------
// Operators on L2(G, V)

/// Where each irrep's segment sits in the Peter-Weyl coordinates.
struct BlockLayout {
  std::size_t fiber_dim = 1;
  std::vector<std::size_t> irrep_dim;     ///< d_pi
  std::vector<std::size_t> multiplicity;  ///< d_pi * fiber_dim
  std::vector<std::size_t> offset;        ///< start of segment pi
  std::size_t total = 0;

  std::size_t extent(std::size_t k) const { return irrep_dim[k] * multiplicity[k]; }
};

inline BlockLayout make_block_layout(const IrrepCatalogue& cat, std::size_t fiber_dim) {
  BlockLayout l;
  l.fiber_dim = fiber_dim;
  for (const auto& ir : cat.irreps()) {
    const std::size_t d = ir.rep.dim();
    l.irrep_dim.push_back(d);
    l.multiplicity.push_back(d * fiber_dim);
    l.offset.push_back(l.total);
    l.total += d * d * fiber_dim;
  }
  return l;
}

/// Unitary U with rows (pi, b, a, v) and columns (x, v):
///   U[(pi,b,a,v),(x,v)] = sqrt(d_pi/|G|) conj(pi(x)[b][a]).
inline ComplexMatrix peter_weyl_basis(const IrrepCatalogue& cat, std::size_t fiber_dim) {
  if (!cat.completeness_checked())
    throw InvalidArgument("peter_weyl_basis: catalogue is not known to be complete");
  const BlockLayout l = make_block_layout(cat, fiber_dim);
  const std::size_t n = cat.group()->order();
  ComplexMatrix u(l.total, n * fiber_dim);
  for (std::size_t k = 0; k < cat.size(); ++k) {
    const auto& pi = cat[k].rep;
    const std::size_t d = pi.dim();
    const double scale = std::sqrt(static_cast<double>(d) / static_cast<double>(n));
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t v = 0; v < fiber_dim; ++v) {
          const std::size_t row = l.offset[k] + (b * d + a) * fiber_dim + v;
          for (Element x = 0; x < n; ++x) u(row, x * fiber_dim + v) = scale * std::conj(pi[x](b, a));
        }
  }
  return u;
}

/// Action of the group on segment k of the Peter-Weyl coordinates.
inline Representation segment_action(const IrrepCatalogue& cat, std::size_t k, const Representation& fiber) {
  const auto& pi = cat[k].rep;
  const ComplexMatrix id = ComplexMatrix::identity(pi.dim());
  std::vector<ComplexMatrix> ms;
  for (Element g = 0; g < cat.group()->order(); ++g) ms.push_back(kron(kron(conj(pi[g]), id), fiber[g]));
  return Representation(cat.group(), std::move(ms));
}

/// The regular representation tensored with a fiber representation, on
/// coordinates (x, v) with v fastest: ((tau (x) rho)(g) f)(x) = rho(g) f(g^-1 x).
inline Representation induced_representation(const Representation& fiber) {
  return tensor_representation(regular_representation(fiber.group()), fiber);
}

struct OperatorBlocks {
  IrrepCatalogue catalogue;
  BlockLayout layout_in;
  BlockLayout layout_out;
  std::vector<ComplexMatrix> blocks;  ///< (pi, sigma) at pi * size + sigma

  const ComplexMatrix& at(std::size_t pi, std::size_t sigma) const {
    return blocks[pi * catalogue.size() + sigma];
  }
  ComplexMatrix& at(std::size_t pi, std::size_t sigma) { return blocks[pi * catalogue.size() + sigma]; }
};

namespace detail {

inline void check_operator_inputs(const ComplexMatrix& t, const IrrepCatalogue& cat,
                                  const Representation& fin, const Representation& fout,
                                  const char* where) {
  if (!cat.completeness_checked())
    throw InvalidArgument(std::string(where) + ": catalogue is not known to be complete");
  if (!same_group(fin.group(), cat.group()) || !same_group(fout.group(), cat.group()))
    throw InvalidArgument(std::string(where) + ": fiber representations live on a different group");
  const std::size_t n = cat.group()->order();
  if (t.rows() != n * fout.dim() || t.cols() != n * fin.dim())
    throw InvalidArgument(std::string(where) + ": operator shape does not match |G| times fiber dims");
}

/// (1/|G|) sum_g conj(chi_in(g)) chi_out(g): dimension of Hom_G(in, out).
inline double hom_dimension(const Representation& in, const Representation& out) {
  Complex s{};
  for (Element g = 0; g < in.group()->order(); ++g) s += std::conj(in.character(g)) * out.character(g);
  return s.real() / static_cast<double>(in.group()->order());
}

}  // namespace detail

/// Rewrites t in Peter-Weyl coordinates and slices it into (pi, sigma) blocks.
inline OperatorBlocks operator_fourier(const ComplexMatrix& t, const IrrepCatalogue& cat,
                                       const Representation& fiber_in, const Representation& fiber_out) {
  detail::check_operator_inputs(t, cat, fiber_in, fiber_out, "operator_fourier");
  const ComplexMatrix uin = peter_weyl_basis(cat, fiber_in.dim());
  const ComplexMatrix uout = peter_weyl_basis(cat, fiber_out.dim());
  const ComplexMatrix that = matmul(matmul(uout, t), conj_transpose(uin));
  OperatorBlocks ob{cat, make_block_layout(cat, fiber_in.dim()), make_block_layout(cat, fiber_out.dim()), {}};
  for (std::size_t p = 0; p < cat.size(); ++p)
    for (std::size_t s = 0; s < cat.size(); ++s) {
      const std::size_t r0 = ob.layout_out.offset[p], c0 = ob.layout_in.offset[s];
      ComplexMatrix blk(ob.layout_out.extent(p), ob.layout_in.extent(s));
      for (std::size_t i = 0; i < blk.rows(); ++i)
        for (std::size_t j = 0; j < blk.cols(); ++j) blk(i, j) = that(r0 + i, c0 + j);
      ob.blocks.push_back(std::move(blk));
    }
  return ob;
}

inline ComplexMatrix inverse_operator_fourier(const OperatorBlocks& ob) {
  const auto& cat = ob.catalogue;
  ComplexMatrix that(ob.layout_out.total, ob.layout_in.total);
  for (std::size_t p = 0; p < cat.size(); ++p)
    for (std::size_t s = 0; s < cat.size(); ++s) {
      const auto& blk = ob.at(p, s);
      if (blk.rows() != ob.layout_out.extent(p) || blk.cols() != ob.layout_in.extent(s))
        throw InvalidArgument("inverse_operator_fourier: block shape does not match layout");
      const std::size_t r0 = ob.layout_out.offset[p], c0 = ob.layout_in.offset[s];
      for (std::size_t i = 0; i < blk.rows(); ++i)
        for (std::size_t j = 0; j < blk.cols(); ++j) that(r0 + i, c0 + j) = blk(i, j);
    }
  const ComplexMatrix uin = peter_weyl_basis(cat, ob.layout_in.fiber_dim);
  const ComplexMatrix uout = peter_weyl_basis(cat, ob.layout_out.fiber_dim);
  return matmul(matmul(conj_transpose(uout), that), uin);
}

/// Equivariant projection through the Fourier domain: transform, zero every
/// (pi, sigma) block whose intertwiner space is trivial, replace each
/// surviving block by its Haar average under the segment actions, transform
/// back. For scalar fibers (and equal fibers over abelian groups) the zeroed
/// blocks are exactly the off-diagonal ones.
inline ComplexMatrix project_equivariant_spectral(const ComplexMatrix& t, const IrrepCatalogue& cat,
                                                  const Representation& fiber_in,
                                                  const Representation& fiber_out) {
  OperatorBlocks ob = operator_fourier(t, cat, fiber_in, fiber_out);
  std::vector<Representation> act_in, act_out;
  for (std::size_t k = 0; k < cat.size(); ++k) {
    act_in.push_back(segment_action(cat, k, fiber_in));
    act_out.push_back(segment_action(cat, k, fiber_out));
  }
  for (std::size_t p = 0; p < cat.size(); ++p)
    for (std::size_t s = 0; s < cat.size(); ++s) {
      ComplexMatrix& blk = ob.at(p, s);
      if (detail::hom_dimension(act_in[s], act_out[p]) < 0.5) {
        blk = ComplexMatrix(blk.rows(), blk.cols());
        continue;
      }
      blk = project_finite(LinearLayerSpec(blk, act_in[s], act_out[p]));
    }
  return inverse_operator_fourier(ob);
}

/// Which block pairs survive the masking step of project_equivariant_spectral.
inline std::vector<std::vector<bool>> spectral_block_mask(const IrrepCatalogue& cat,
                                                          const Representation& fiber_in,
                                                          const Representation& fiber_out) {
  std::vector<std::vector<bool>> mask(cat.size(), std::vector<bool>(cat.size()));
  for (std::size_t p = 0; p < cat.size(); ++p)
    for (std::size_t s = 0; s < cat.size(); ++s)
      mask[p][s] = detail::hom_dimension(segment_action(cat, s, fiber_in),
                                         segment_action(cat, p, fiber_out)) >= 0.5;
  return mask;
}

// ---------------------------------------------------------------------------
// Cyclic fast path

enum class CirculantMethod { Fft, DiagonalMean };

/// Nearest circulant in Frobenius norm (the C_n-equivariant projection for
/// C_n acting on itself). The FFT path keeps the 2-D spectrum on the
/// anti-diagonal k + l = 0 mod n; the diagonal-mean path averages each
/// wrapped diagonal directly.
inline ComplexMatrix project_equivariant_circulant(const ComplexMatrix& t,
                                                   CirculantMethod method = CirculantMethod::Fft) {
  if (t.rows() != t.cols()) throw InvalidArgument("project_equivariant_circulant: matrix is not square");
  if (!all_finite(t)) throw InvalidArgument("project_equivariant_circulant: non-finite entry");
  const std::size_t n = t.rows();
  if (method == CirculantMethod::DiagonalMean) {
    std::vector<Complex> diag(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) diag[(i + n - j) % n] += t(i, j);
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) = diag[(i + n - j) % n] / static_cast<double>(n);
    return out;
  }
  ComplexMatrix spec = t;
  fft::transform2d(spec, fft::Direction::Forward);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      if ((k + l) % n != 0) spec(k, l) = Complex{};
  fft::transform2d(spec, fft::Direction::Inverse);
  return spec;
}

// ---------------------------------------------------------------------------
// SO(2) harmonic masking

/// 0/1 pattern keeping entries whose output and input harmonic degrees agree.
/// Layout is degree-major, channel-minor on both sides.
inline std::vector<unsigned char> harmonic_mask_pattern(std::size_t rows, std::size_t cols,
                                                        const std::vector<int>& degrees_out,
                                                        const std::vector<int>& degrees_in) {
  if (degrees_out.empty() || degrees_in.empty() || rows % degrees_out.size() != 0 ||
      cols % degrees_in.size() != 0)
    throw InvalidArgument("harmonic_mask: weight shape is not a multiple of the degree layout");
  const std::size_t cout = rows / degrees_out.size(), cin = cols / degrees_in.size();
  std::vector<unsigned char> keep(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      keep[i * cols + j] = degrees_out[i / cout] == degrees_in[j / cin] ? 1 : 0;
  return keep;
}

inline ComplexMatrix harmonic_mask(const ComplexMatrix& weights, const std::vector<int>& degrees_out,
                                   const std::vector<int>& degrees_in) {
  const auto keep = harmonic_mask_pattern(weights.rows(), weights.cols(), degrees_out, degrees_in);
  ComplexMatrix out = weights;
  for (std::size_t k = 0; k < keep.size(); ++k)
    if (!keep[k]) out.data()[k] = Complex{};
  return out;
}

/// Degrees -m..m, each repeated once (the block order used by the toy model).
inline std::vector<int> harmonic_degrees(int max_degree) {
  std::vector<int> d;
  for (int m = -max_degree; m <= max_degree; ++m) d.push_back(m);
  return d;
}

}  // namespace equiproj

#endif  // EQUIPROJ_SPECTRAL_HPP
