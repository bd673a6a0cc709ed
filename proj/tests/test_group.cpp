#include <gtest/gtest.h>

#include "support.hpp"

using namespace equiproj;

namespace {

void expect_group_axioms(const FiniteGroup& g) {
  const std::size_t n = g.order();
  const Element e = g.identity();
  for (Element a = 0; a < n; ++a) {
    EXPECT_EQ(g.cayley()[e][a], a);
    EXPECT_EQ(g.cayley()[a][e], a);
    EXPECT_EQ(g.cayley()[a][g.inverse(a)], e);
    for (Element b = 0; b < n; ++b)
      for (Element c = 0; c < n; ++c)
        ASSERT_EQ(g.cayley()[g.cayley()[a][b]][c], g.cayley()[a][g.cayley()[b][c]]);
  }
}

void expect_homomorphism(const Representation& r) {
  const auto& g = *r.group();
  for (Element a = 0; a < g.order(); ++a) {
    EXPECT_LE(max_abs_diff(support::naive_matmul(r[a], conj_transpose(r[a])), ComplexMatrix::identity(r.dim())), 1e-12);
    for (Element b = 0; b < g.order(); ++b)
      ASSERT_LE(max_abs_diff(support::naive_matmul(r[a], r[b]), r[g.mul(a, b)]), 1e-12);
  }
  EXPECT_EQ(r[g.identity()], ComplexMatrix::identity(r.dim()));
}

}  // namespace

TEST(Cyclic, TrivialGroup) {
  const auto g = make_cyclic(1);
  EXPECT_EQ(g->order(), 1u);
  EXPECT_EQ(g->identity(), 0u);
}

TEST(Cyclic, ModularArithmetic) {
  const auto g = make_cyclic(4);
  EXPECT_EQ(g->mul(3, 2), 1u);
  EXPECT_EQ(g->inverse(3), 1u);
}

TEST(Cyclic, AxiomsHoldExhaustively) { expect_group_axioms(*make_cyclic(8)); }

TEST(Cyclic, ZeroOrderRejected) { EXPECT_THROW(make_cyclic(0), InvalidArgument); }

TEST(Dihedral, OrderTwoIsC2) {
  const auto g = make_dihedral(1);
  EXPECT_EQ(g->order(), 2u);
  EXPECT_EQ(*g, *make_cyclic(2));
}

TEST(Dihedral, ReflectionsAreInvolutions) {
  const auto g = make_dihedral(4);
  EXPECT_EQ(g->order(), 8u);
  for (Element x = 4; x < 8; ++x) EXPECT_EQ(g->inverse(x), x);
  expect_group_axioms(*g);
}

TEST(Dihedral, D3MatchesTrianglePermutations) {
  const std::size_t n = 3;
  const auto g = make_dihedral(n);
  const auto perms = support::dihedral_permutations(n);
  for (Element a = 0; a < 2 * n; ++a)
    for (Element b = 0; b < 2 * n; ++b) {
      std::vector<std::size_t> comp(n);
      for (std::size_t v = 0; v < n; ++v) comp[v] = perms[a][perms[b][v]];
      const auto it = std::find(perms.begin(), perms.end(), comp);
      ASSERT_NE(it, perms.end());
      EXPECT_EQ(g->mul(a, b), static_cast<Element>(it - perms.begin())) << a << "*" << b;
    }
}

TEST(Dihedral, ZeroOrderRejected) { EXPECT_THROW(make_dihedral(0), InvalidArgument); }

TEST(FiniteGroupValidation, RejectsNonAssociativeTable) {
  // A Latin square with identity 0 that is not a group table.
  std::vector<std::vector<Element>> t = {
      {0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}};
  EXPECT_THROW(FiniteGroup("bad", t), InvalidArgument);
}

TEST(FiniteGroupValidation, RejectsMissingIdentity) {
  EXPECT_THROW(FiniteGroup("bad", {{1, 0}, {1, 0}}), InvalidArgument);
}

TEST(CyclicIrreps, SingleTrivial) {
  const auto cat = cyclic_irreps(1);
  ASSERT_EQ(cat.size(), 1u);
  EXPECT_EQ(cat.trivial_index(), 0u);
}

TEST(CyclicIrreps, QuarterTurnIsI) {
  const auto cat = cyclic_irreps(4);
  EXPECT_EQ(cat[1].rep[1](0, 0), Complex(0.0, 1.0));
}

TEST(CyclicIrreps, DimensionCountAndGram) {
  const auto cat = cyclic_irreps(8);
  std::size_t count = 0;
  for (const auto& ir : cat.irreps()) count += ir.rep.dim() * ir.rep.dim();
  EXPECT_EQ(count, 8u);
  EXPECT_TRUE(cat.completeness_checked());
  // Independent Gram: chi_k(g) = exp(2 pi i k g / 8).
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t b = 0; b < 8; ++b) {
      Complex s{};
      for (std::size_t g = 0; g < 8; ++g)
        s += cat[a].rep.character(g) * std::conj(std::polar(1.0, 2.0 * std::numbers::pi * double(b * g) / 8.0));
      EXPECT_NEAR(std::abs(s / 8.0 - Complex(a == b ? 1.0 : 0.0)), 0.0, 1e-10);
    }
  EXPECT_EQ(cat.trivial_index(), 0u);
}

TEST(CyclicIrreps, IncompleteCatalogueRejectedWhenChecked) {
  const auto g = make_cyclic(4);
  std::vector<LabelledIrrep> irreps{{0, cyclic_irrep(g, 0)}, {1, cyclic_irrep(g, 1)}};
  EXPECT_THROW(IrrepCatalogue(g, irreps, true), InvalidArgument);
  EXPECT_FALSE(IrrepCatalogue(g, irreps, false).completeness_checked());
}

TEST(Regular, TrivialGroupIsOneByOne) {
  const auto r = regular_representation(make_cyclic(1));
  EXPECT_EQ(r[0], ComplexMatrix::identity(1));
}

TEST(Regular, C4GeneratorIsCyclicShift) {
  const auto r = regular_representation(make_cyclic(4));
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y) EXPECT_EQ(r[1](x, y), Complex(x == (y + 1) % 4 ? 1.0 : 0.0));
  EXPECT_TRUE(r.is_permutation());
}

TEST(Regular, D4Homomorphism) { expect_homomorphism(regular_representation(make_dihedral(4))); }

TEST(Tensor, TrivialTimesTrivial) {
  const auto g = make_cyclic(3);
  const auto t = tensor_representation(trivial_representation(g), trivial_representation(g));
  for (Element x = 0; x < 3; ++x) EXPECT_EQ(t[x], ComplexMatrix::identity(1));
}

TEST(Tensor, CharactersMultiply) {
  const auto g = make_cyclic(4);
  const auto t = tensor_representation(cyclic_irrep(g, 1), cyclic_irrep(g, 3));
  for (Element x = 0; x < 4; ++x) EXPECT_EQ(t[x], ComplexMatrix::identity(1));
}

TEST(Tensor, RegularSquaredOnC2) {
  const auto g = make_cyclic(2);
  const auto r = regular_representation(g);
  const auto t = tensor_representation(r, r);
  EXPECT_EQ(t.dim(), 4u);
  expect_homomorphism(t);
}

TEST(Tensor, GroupMismatchRejected) {
  EXPECT_THROW(tensor_representation(trivial_representation(make_cyclic(2)), trivial_representation(make_cyclic(3))),
               InvalidArgument);
}

TEST(Conjugate, RealPermutationUnchanged) {
  const auto r = regular_representation(make_dihedral(3));
  const auto c = conjugate_representation(r);
  for (Element x = 0; x < 6; ++x) EXPECT_EQ(c[x], r[x]);
}

TEST(Conjugate, C4IrrepOneBecomesThree) {
  const auto g = make_cyclic(4);
  const auto c = conjugate_representation(cyclic_irrep(g, 1));
  const auto three = cyclic_irrep(g, 3);
  for (Element x = 0; x < 4; ++x) EXPECT_EQ(c[x], three[x]);
}

TEST(Conjugate, DoubleConjugationIsIdentity) {
  Rng rng(7);
  for (const auto& ng : support::test_groups()) {
    const auto r = support::random_representation(ng.group, rng);
    const auto cc = conjugate_representation(conjugate_representation(r));
    for (Element x = 0; x < ng.group->order(); ++x) EXPECT_EQ(cc[x], r[x]);
  }
}

TEST(RepresentationValidation, RejectsNonHomomorphism) {
  const auto g = make_cyclic(2);
  EXPECT_THROW(Representation(g, {ComplexMatrix::identity(1), ComplexMatrix{{Complex(0.0, 1.0)}}}), InvalidArgument);
}

TEST(RepresentationValidation, RejectsNonUnitary) {
  const auto g = make_cyclic(1);
  EXPECT_THROW(Representation(g, {ComplexMatrix{{2.0}}}), InvalidArgument);
}

TEST(RepresentationValidation, AllProducedRepsValid) {
  Rng rng(11);
  for (const auto& ng : support::test_groups()) {
    expect_homomorphism(regular_representation(ng.group));
    for (int t = 0; t < 3; ++t) expect_homomorphism(support::random_representation(ng.group, rng));
    if (support::is_dihedral(ng.group)) expect_homomorphism(dihedral_standard_representation(ng.group));
  }
}
