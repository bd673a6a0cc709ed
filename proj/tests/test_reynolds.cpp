#include <gtest/gtest.h>

#include "support.hpp"

using namespace equiproj;

TEST(ProjectFinite, TrivialGroupIsIdentityMap) {
  Rng rng(1);
  const auto g = make_cyclic(1);
  const auto w = random_gaussian(3, 2, rng);
  const LinearLayerSpec layer(w, direct_sum({trivial_representation(g), trivial_representation(g)}),
                              direct_sum({trivial_representation(g), trivial_representation(g), trivial_representation(g)}));
  EXPECT_EQ(project_finite(layer), w);
}

TEST(ProjectFinite, IdentityIntertwines) {
  Rng rng(2);
  for (const auto& ng : support::test_groups()) {
    const auto r = support::random_representation(ng.group, rng);
    const LinearLayerSpec layer(ComplexMatrix::identity(r.dim()), r, r);
    EXPECT_LE(max_abs_diff(project_finite(layer), ComplexMatrix::identity(r.dim())), 1e-12) << ng.name;
  }
}

TEST(ProjectFinite, C4RegularMatchesOracle) {
  Rng rng(3);
  const auto g = make_cyclic(4);
  const auto reg = regular_representation(g);
  const LinearLayerSpec layer(random_gaussian(4, 4, rng), reg, reg);
  EXPECT_LE(support::frob_diff(project_finite(layer), commutant_oracle(layer)), 1e-10);
  // Equivariant maps of the regular representation of C4 are circulants.
  EXPECT_LE(support::frob_diff(project_finite(layer), support::diagonal_mean_oracle(layer.weight())), 1e-12);
}

TEST(ProjectFinite, PropertiesAcrossGroups) {
  Rng rng(4);
  for (const auto& ng : support::test_groups()) {
    for (int t = 0; t < 20; ++t) {
      const auto layer = support::random_layer(ng.group, rng);
      const auto p = project_finite(layer);
      EXPECT_LE(support::frob_diff(project_finite(layer.with_weight(p)), p), 1e-12) << ng.name;
      EXPECT_LE(support::max_commutator(p, layer.rep_in(), layer.rep_out()), 1e-10) << ng.name;
      EXPECT_LE(support::frob_diff(p, commutant_oracle(layer)), 1e-10) << ng.name;
      const auto b = random_gaussian(p.rows(), p.cols(), rng);
      const auto pb = project_finite(layer.with_weight(b));
      EXPECT_LE(std::abs(hs_inner(p, b) - hs_inner(layer.weight(), pb)), 1e-10) << ng.name;
    }
  }
}

TEST(ProjectFinite, ShapeMismatchRejected) {
  const auto g = make_cyclic(2);
  EXPECT_THROW(LinearLayerSpec(ComplexMatrix(2, 3), regular_representation(g), regular_representation(g)),
               InvalidArgument);
  EXPECT_NO_THROW(LinearLayerSpec(ComplexMatrix(2, 2), regular_representation(g), regular_representation(make_cyclic(2))));
}

TEST(ProjectFinite, DifferentGroupsRejected) {
  EXPECT_THROW(LinearLayerSpec(ComplexMatrix(4, 4), regular_representation(make_cyclic(4)),
                               regular_representation(make_dihedral(2))),
               InvalidArgument);
}

TEST(CommutantOracle, TrivialGroupReturnsInput) {
  Rng rng(5);
  const auto g = make_cyclic(1);
  const auto w = random_gaussian(1, 1, rng);
  const LinearLayerSpec layer(w, trivial_representation(g), trivial_representation(g));
  EXPECT_LE(max_abs_diff(commutant_oracle(layer), w), 1e-14);
}

TEST(CommutantOracle, SignRepresentationOnC2) {
  const auto g = make_cyclic(2);
  const Representation sign(g, {ComplexMatrix{{1.0}}, ComplexMatrix{{-1.0}}});
  const ComplexMatrix w{{Complex(0.3, -2.0)}};
  EXPECT_LE(max_abs_diff(commutant_oracle(LinearLayerSpec(w, sign, sign)), w), 1e-14);
}

TEST(CommutantOracle, CapEnforced) {
  const auto g = make_cyclic(1);
  std::vector<Representation> parts(65, trivial_representation(g));
  const auto big = direct_sum(parts);
  EXPECT_THROW(commutant_oracle(LinearLayerSpec(ComplexMatrix(65, 65), big, big)), CapacityError);
}

TEST(OrbitDecompose, EquivariantInputHasNoAnti) {
  Rng rng(6);
  const auto layer = support::random_layer(make_dihedral(3), rng);
  const auto eq = layer.with_weight(project_finite(layer));
  const auto d = orbit_decompose(eq);
  EXPECT_LE(support::frob(d.anti), 1e-12);
}

TEST(OrbitDecompose, AntiInputHasNoEquivariantPart) {
  Rng rng(7);
  const auto layer = support::random_layer(make_cyclic(4), rng);
  const auto anti = layer.with_weight(layer.weight() - project_finite(layer));
  EXPECT_LE(support::frob(orbit_decompose(anti).equivariant), 1e-10);
}

TEST(OrbitDecompose, PythagorasOnC4) {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto layer = support::random_layer(make_cyclic(4), rng);
    const auto d = orbit_decompose(layer);
    EXPECT_LE(max_abs_diff(d.equivariant + d.anti, layer.weight()), 1e-14);
    EXPECT_LE(std::abs(hs_inner(d.equivariant, d.anti)), 1e-9);
    const double lhs = std::pow(support::frob(layer.weight()), 2);
    const double rhs = std::pow(support::frob(d.equivariant), 2) + std::pow(support::frob(d.anti), 2);
    EXPECT_NEAR(lhs, rhs, 1e-9 * lhs);
  }
}

TEST(Rot90, IdentityPeriodAndCentre) {
  Rng rng(9);
  const auto k = support::random_kernel(2, 1, 5, rng);
  EXPECT_EQ(rot90_kernel(k, 0), k);
  EXPECT_EQ(rot90_kernel(rot90_kernel(rot90_kernel(rot90_kernel(k, 1), 1), 1), 1), k);
  for (int r = 0; r < 4; ++r) {
    const auto rk = rot90_kernel(k, r);
    for (std::size_t a = 0; a < 4; ++a) EXPECT_EQ(rk(1, 0, a, 3 - a, 2, 2), k(1, 0, a, 3 - a, 2, 2));
  }
}

TEST(Rot90, SingleStepIndexMap) {
  SteerableKernel k(1, 1, 3);
  k(0, 0, 0, 0, 0, 1) = 1.0;  // (i, j) = (0, 1) -> (1, 2)
  EXPECT_EQ(rot90_kernel(k, 1)(0, 0, 0, 0, 1, 2), 1.0);
}

TEST(SteerableKernelShape, EvenSizeRejected) { EXPECT_THROW(SteerableKernel(1, 1, 4), InvalidArgument); }

TEST(ProjectC4Kernel, ConstantKernelUnchanged) {
  SteerableKernel k(2, 3, 3);
  for (auto& v : k.values()) v = 1.75;
  EXPECT_EQ(project_c4_kernel(k), k);
}

TEST(ProjectC4Kernel, Idempotent) {
  Rng rng(10);
  const auto p = project_c4_kernel(support::random_kernel(2, 2, 3, rng));
  const auto pp = project_c4_kernel(p);
  for (std::size_t i = 0; i < p.values().size(); ++i) EXPECT_NEAR(pp.values()[i], p.values()[i], 1e-13);
}

TEST(ProjectC4Kernel, FormsAgreeAndMatchMatrixOracle) {
  Rng rng(11);
  const auto k = support::random_kernel(2, 3, 5, rng);
  const auto avg = project_c4_kernel(k);
  EXPECT_EQ(avg, project_c4_kernel_indexwise(k));
  const auto oracle = support::c4_kernel_matrix_oracle(k);
  for (std::size_t i = 0; i < avg.values().size(); ++i) EXPECT_NEAR(avg.values()[i], oracle.values()[i], 1e-10);
  // Library permutation representations give the same projection.
  const auto reps = c4_kernel_representations(make_cyclic(4), 2, 3, 5);
  const auto pm = project_finite(LinearLayerSpec(kernel_to_matrix(k), reps.rep_in, reps.rep_out));
  const auto back = kernel_from_matrix(pm, 2, 3, 5);
  for (std::size_t i = 0; i < avg.values().size(); ++i) EXPECT_NEAR(avg.values()[i], back.values()[i], 1e-10);
}

TEST(ProjectC4Kernel, SelfAdjointUnderEntrywiseInner) {
  Rng rng(12);
  const auto a = support::random_kernel(1, 2, 3, rng);
  const auto b = support::random_kernel(1, 2, 3, rng);
  const auto pa = project_c4_kernel(a), pb = project_c4_kernel(b);
  double l = 0.0, r = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    l += pa.values()[i] * b.values()[i];
    r += a.values()[i] * pb.values()[i];
  }
  EXPECT_NEAR(l, r, 1e-10);
}

TEST(TreeSum, BitStableAcrossCalls) {
  Rng rng(13);
  const auto layer = support::random_layer(make_cyclic(8), rng);
  EXPECT_EQ(project_finite(layer), project_finite(layer));
}
