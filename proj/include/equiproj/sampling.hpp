#ifndef EQUIPROJ_SAMPLING_HPP
#define EQUIPROJ_SAMPLING_HPP

// Random representations and layers for property suites.

#include <cstddef>
#include <vector>

#include "equiproj/group.hpp"
#include "equiproj/random.hpp"
#include "equiproj/reynolds.hpp"

namespace equiproj {

inline bool is_dihedral(const GroupPtr& g) {
  return g->order() % 2 == 0 && g->order() >= 2 && *g == *make_dihedral(g->order() / 2);
}

/// A direct sum of 2..4 building blocks (irreps for cyclic groups; trivial,
/// sign, standard and small regular for dihedral groups) conjugated by a
/// random unitary. With `permutation`, the regular representation,
/// optionally plus a trivial summand, in the standard basis.
inline Representation random_representation(const GroupPtr& g, Rng& rng, bool permutation = false) {
  if (permutation) {
    std::vector<Representation> parts{regular_representation(g)};
    if (rng.uniform() < 0.5) parts.push_back(trivial_representation(g));
    return direct_sum(parts);
  }
  std::vector<Representation> parts;
  const std::size_t blocks = 2 + rng.index(3);
  const bool dihedral = g->order() > 2 && is_dihedral(g);
  for (std::size_t b = 0; b < blocks; ++b) {
    if (dihedral) {
      const std::size_t n = g->order() / 2;
      switch (rng.index(4)) {
        case 0: parts.push_back(trivial_representation(g)); break;
        case 1: {
          std::vector<ComplexMatrix> ms;
          for (Element x = 0; x < 2 * n; ++x) ms.push_back(ComplexMatrix{{x < n ? 1.0 : -1.0}});
          parts.emplace_back(g, std::move(ms));
          break;
        }
        case 2: parts.push_back(dihedral_standard_representation(g)); break;
        default:
          if (g->order() <= 6) parts.push_back(regular_representation(g));
          else parts.push_back(dihedral_standard_representation(g));
      }
    } else {
      parts.push_back(cyclic_irrep(g, rng.index(g->order())));
    }
  }
  const Representation sum = direct_sum(parts);
  return change_of_basis(sum, random_unitary(sum.dim(), rng));
}

inline LinearLayerSpec random_layer(const GroupPtr& g, Rng& rng) {
  Representation in = random_representation(g, rng);
  Representation out = random_representation(g, rng);
  return LinearLayerSpec(random_gaussian(out.dim(), in.dim(), rng), in, out);
}

}  // namespace equiproj

#endif  // EQUIPROJ_SAMPLING_HPP
