#include <gtest/gtest.h>

#include "support.hpp"

using namespace equiproj;

namespace {

GroupFunction random_function(const GroupPtr& g, Rng& rng) {
  std::vector<Complex> v(g->order());
  for (auto& z : v) z = Complex(rng.normal(), rng.normal());
  return GroupFunction(g, v);
}

double l2(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

/// I_d (x) B fit of a square block with rows and cols (b, m): least squares
/// for B is the mean of the diagonal sub-blocks; returns the residual.
double identity_kron_residual(const ComplexMatrix& blk, std::size_t d) {
  const std::size_t mr = blk.rows() / d, mc = blk.cols() / d;
  ComplexMatrix a(d * mr * mc, mr * mc), rhs(d * mr * mc, 1);
  for (std::size_t b = 0; b < d; ++b)
    for (std::size_t i = 0; i < mr; ++i)
      for (std::size_t j = 0; j < mc; ++j) {
        const std::size_t row = (b * mr + i) * mc + j;
        a(row, i * mc + j) = 1.0;
        rhs(row, 0) = blk(b * mr + i, b * mc + j);
      }
  const auto fit = solve_least_squares(a, rhs);
  ComplexMatrix model(blk.rows(), blk.cols());
  for (std::size_t b = 0; b < d; ++b)
    for (std::size_t i = 0; i < mr; ++i)
      for (std::size_t j = 0; j < mc; ++j) model(b * mr + i, b * mc + j) = fit.solution(i * mc + j, 0);
  return support::frob_diff(model, blk);
}

}  // namespace

TEST(Fourier, ConstantFunctionLivesOnTrivialBlock) {
  const auto cat = cyclic_irreps(6);
  const auto fb = fourier_transform(GroupFunction(cat.group(), std::vector<Complex>(6, Complex(2.5, -1))), cat);
  for (std::size_t k = 0; k < cat.size(); ++k)
    EXPECT_LE(std::abs(fb.blocks[k](0, 0) - (k == cat.trivial_index() ? Complex(2.5, -1) : Complex{})), 1e-14);
}

TEST(Fourier, DeltaAtIdentity) {
  const auto cat = cyclic_irreps(4);
  std::vector<Complex> v(4);
  v[0] = 1.0;
  const auto fb = fourier_transform(GroupFunction(cat.group(), v), cat);
  for (const auto& b : fb.blocks) EXPECT_EQ(b(0, 0), Complex(0.25));
}

TEST(Fourier, MatchesExponentialSumsOnC8) {
  Rng rng(1);
  const auto cat = cyclic_irreps(8);
  const auto f = random_function(cat.group(), rng);
  const auto fb = fourier_transform(f, cat);
  for (std::size_t k = 0; k < 8; ++k) {
    Complex s{};
    for (std::size_t g = 0; g < 8; ++g)
      s += f.values[g] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * g) / 8.0);
    EXPECT_LE(std::abs(fb.blocks[k](0, 0) - s / 8.0), 1e-13);
  }
}

TEST(Fourier, RoundTripAndPlancherel) {
  Rng rng(2);
  for (std::size_t n : {1u, 2u, 4u, 8u}) {
    const auto cat = cyclic_irreps(n);
    for (int t = 0; t < 100; ++t) {
      const auto f = random_function(cat.group(), rng);
      const auto fb = fourier_transform(f, cat);
      const auto back = inverse_fourier_transform(fb);
      for (std::size_t g = 0; g < n; ++g) EXPECT_LE(std::abs(back.values[g] - f.values[g]), 1e-12);
      double spec = 0.0;
      for (std::size_t k = 0; k < cat.size(); ++k)
        spec += double(cat[k].rep.dim()) * std::pow(support::frob(fb.blocks[k]), 2);
      EXPECT_NEAR(std::pow(l2(f.values), 2) / double(n), spec, 1e-12 * (1 + spec));
    }
  }
}

TEST(Fourier, InverseOfZeroAndTrivialOnly) {
  const auto cat = cyclic_irreps(4);
  FourierBlocks fb{cat, std::vector<ComplexMatrix>(4, ComplexMatrix(1, 1))};
  for (const auto& z : inverse_fourier_transform(fb).values) EXPECT_EQ(z, Complex{});
  fb.blocks[cat.trivial_index()](0, 0) = 1.0;
  for (const auto& z : inverse_fourier_transform(fb).values) EXPECT_EQ(z, Complex(1.0));
}

TEST(Fourier, InvariantIffOnlyTrivialBlock) {
  Rng rng(3);
  const auto cat = cyclic_irreps(8);
  // Invariant function: nontrivial blocks vanish.
  const auto c = GroupFunction(cat.group(), std::vector<Complex>(8, Complex(rng.normal(), rng.normal())));
  const auto fb = fourier_transform(c, cat);
  for (std::size_t k = 0; k < cat.size(); ++k)
    if (k != cat.trivial_index()) EXPECT_LE(support::frob(fb.blocks[k]), 1e-12);
  // Only trivial block: the function is constant.
  FourierBlocks only{cat, std::vector<ComplexMatrix>(8, ComplexMatrix(1, 1))};
  only.blocks[cat.trivial_index()](0, 0) = Complex(rng.normal(), rng.normal());
  const auto f = inverse_fourier_transform(only);
  for (std::size_t g = 1; g < 8; ++g) EXPECT_LE(std::abs(f.values[g] - f.values[0]), 1e-12);
}

TEST(Fourier, ProjectInvariantIsMean) {
  Rng rng(4);
  const auto cat = cyclic_irreps(8);
  const auto constant = GroupFunction(cat.group(), std::vector<Complex>(8, Complex(0.5, 3)));
  for (std::size_t g = 0; g < 8; ++g)
    EXPECT_LE(std::abs(project_invariant(constant, cat).values[g] - Complex(0.5, 3)), 1e-13);
  std::vector<Complex> zm{1, -1, 1, -1, 2, -2, 0, 0};
  for (const auto& z : project_invariant(GroupFunction(cat.group(), zm), cat).values) EXPECT_LE(std::abs(z), 1e-13);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_function(cat.group(), rng);
    Complex mean{};
    for (const auto& z : f.values) mean += z;
    mean /= 8.0;
    for (const auto& z : project_invariant(f, cat).values) EXPECT_LE(std::abs(z - mean), 1e-12);
  }
}

TEST(Fourier, RejectsMismatchedInput) {
  EXPECT_THROW(GroupFunction(make_cyclic(4), std::vector<Complex>(3)), InvalidArgument);
  EXPECT_THROW(fourier_transform(GroupFunction(make_cyclic(3), std::vector<Complex>(3)), cyclic_irreps(4)),
               InvalidArgument);
}

TEST(PeterWeyl, BasisIsUnitary) {
  for (std::size_t n : {1u, 4u, 6u}) {
    const auto u = peter_weyl_basis(cyclic_irreps(n), 2);
    EXPECT_LE(max_abs_diff(matmul(u, conj_transpose(u)), ComplexMatrix::identity(u.rows())), 1e-12);
  }
}

TEST(OperatorFourier, IdentityIsBlockDiagonalIdentity) {
  const auto cat = cyclic_irreps(4);
  const auto fib = direct_sum({trivial_representation(cat.group()), trivial_representation(cat.group())});
  const auto ob = operator_fourier(ComplexMatrix::identity(8), cat, fib, fib);
  for (std::size_t p = 0; p < 4; ++p)
    for (std::size_t s = 0; s < 4; ++s) {
      const auto& b = ob.at(p, s);
      const auto expect = p == s ? ComplexMatrix::identity(b.rows()) : ComplexMatrix(b.rows(), b.cols());
      EXPECT_LE(max_abs_diff(b, expect), 1e-13);
    }
}

TEST(OperatorFourier, TranslationsAreBlockDiagonal) {
  const auto g = make_cyclic(8);
  const auto cat = cyclic_irreps(8);
  const auto reg = regular_representation(g);
  const auto triv = trivial_representation(g);
  for (Element x = 0; x < 8; ++x) {
    const auto ob = operator_fourier(reg[x], cat, triv, triv);
    for (std::size_t p = 0; p < 8; ++p)
      for (std::size_t s = 0; s < 8; ++s)
        if (p != s) EXPECT_LE(support::frob(ob.at(p, s)), 1e-12);
  }
}

TEST(OperatorFourier, NormPreservingRoundTrip) {
  Rng rng(5);
  const auto cat = cyclic_irreps(4);
  const auto fin = support::random_representation(cat.group(), rng);
  const auto fout = support::random_representation(cat.group(), rng);
  const auto t = random_gaussian(4 * fout.dim(), 4 * fin.dim(), rng);
  const auto ob = operator_fourier(t, cat, fin, fout);
  double s = 0.0;
  for (const auto& b : ob.blocks) s += std::pow(support::frob(b), 2);
  EXPECT_NEAR(std::sqrt(s), support::frob(t), 1e-12 * support::frob(t));
  EXPECT_LE(max_abs_diff(inverse_operator_fourier(ob), t), 1e-12);
}

TEST(OperatorFourier, ShapeChecked) {
  const auto cat = cyclic_irreps(4);
  const auto triv = trivial_representation(cat.group());
  EXPECT_THROW(operator_fourier(ComplexMatrix(4, 5), cat, triv, triv), InvalidArgument);
}

TEST(SpectralProjection, EquivariantCommutantIsBlockDiagonal) {
  Rng rng(6);
  for (std::size_t n : {2u, 4u, 8u}) {
    const auto cat = cyclic_irreps(n);
    const auto g = cat.group();
    const auto fin = direct_sum({trivial_representation(g), trivial_representation(g)});
    const auto fout = direct_sum({trivial_representation(g), trivial_representation(g), trivial_representation(g)});
    const LinearLayerSpec layer(random_gaussian(3 * n, 2 * n, rng), induced_representation(fin),
                                induced_representation(fout));
    const auto p = project_finite(layer);
    const auto ob = operator_fourier(p, cat, fin, fout);
    for (std::size_t a = 0; a < cat.size(); ++a)
      for (std::size_t b = 0; b < cat.size(); ++b) {
        if (a != b) EXPECT_LE(support::frob(ob.at(a, b)), 1e-10);
        else EXPECT_LE(identity_kron_residual(ob.at(a, a), cat[a].rep.dim()), 1e-9);
      }
  }
}

TEST(SpectralProjection, ScalarFibersMatchCirculantOracle) {
  Rng rng(7);
  const auto cat = cyclic_irreps(8);
  const auto triv = trivial_representation(cat.group());
  const auto t = random_gaussian(8, 8, rng);
  EXPECT_LE(support::frob_diff(project_equivariant_spectral(t, cat, triv, triv), support::diagonal_mean_oracle(t)),
            1e-12);
}

TEST(SpectralProjection, AgreesWithSpatialProjection) {
  Rng rng(8);
  const auto cat = cyclic_irreps(4);
  const auto g = cat.group();
  const std::vector<std::pair<Representation, Representation>> fibers{
      {cyclic_irrep(g, 1), cyclic_irrep(g, 1)},
      {cyclic_irrep(g, 1), cyclic_irrep(g, 3)},
      {support::random_representation(g, rng), support::random_representation(g, rng)},
      {support::random_representation(g, rng), support::random_representation(g, rng)}};
  for (const auto& [fin, fout] : fibers) {
    const auto t = random_gaussian(4 * fout.dim(), 4 * fin.dim(), rng);
    const auto spatial =
        project_finite(LinearLayerSpec(t, induced_representation(fin), induced_representation(fout)));
    const auto spectral = project_equivariant_spectral(t, cat, fin, fout);
    EXPECT_LE(support::frob_diff(spectral, spatial), 1e-10);
  }
}

TEST(SpectralProjection, MaskForScalarFibersIsDiagonal) {
  const auto cat = cyclic_irreps(4);
  const auto triv = trivial_representation(cat.group());
  const auto mask = spectral_block_mask(cat, triv, triv);
  for (std::size_t p = 0; p < 4; ++p)
    for (std::size_t s = 0; s < 4; ++s) EXPECT_EQ(mask[p][s], p == s);
}

TEST(Circulant, TwoByTwoByHand) {
  const ComplexMatrix t{{1.0, 2.0}, {3.0, 4.0}};
  const ComplexMatrix expect{{2.5, 2.5}, {2.5, 2.5}};
  EXPECT_LE(max_abs_diff(project_equivariant_circulant(t), expect), 1e-15);
  EXPECT_LE(max_abs_diff(project_equivariant_circulant(t, CirculantMethod::DiagonalMean), expect), 1e-15);
}

TEST(Circulant, CirculantInputUnchanged) {
  Rng rng(9);
  std::vector<Complex> c(8);
  for (auto& z : c) z = Complex(rng.normal(), rng.normal());
  ComplexMatrix t(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) t(i, j) = c[(i + 8 - j) % 8];
  EXPECT_LE(max_abs_diff(project_equivariant_circulant(t), t), 1e-13);
}

TEST(Circulant, PathsAgreeWithOraclesAndReynolds) {
  Rng rng(10);
  for (std::size_t n : {3u, 4u, 6u, 8u, 16u}) {
    const auto t = random_gaussian(n, n, rng);
    const auto fft_path = project_equivariant_circulant(t);
    const auto oracle = support::diagonal_mean_oracle(t);
    EXPECT_LE(support::frob_diff(fft_path, oracle), 1e-12) << n;
    EXPECT_LE(support::frob_diff(project_equivariant_circulant(t, CirculantMethod::DiagonalMean), oracle), 1e-12);
    const auto reg = regular_representation(make_cyclic(n));
    EXPECT_LE(support::frob_diff(fft_path, project_finite(LinearLayerSpec(t, reg, reg))), 1e-12) << n;
  }
}

TEST(Circulant, NonSquareRejected) {
  EXPECT_THROW(project_equivariant_circulant(ComplexMatrix(3, 4)), InvalidArgument);
}

TEST(HarmonicMask, MaskedWeightsCommuteWithRotations) {
  Rng rng(11);
  const int m = 3;
  const std::size_t cin = 2, cout = 3;
  const auto deg = harmonic_degrees(m);
  const auto w = random_gaussian(deg.size() * cout, deg.size() * cin, rng);
  const auto masked = harmonic_mask(w, deg, deg);
  auto rot = [&](double theta, std::size_t c) {
    ComplexMatrix r(deg.size() * c, deg.size() * c);
    for (std::size_t k = 0; k < deg.size(); ++k)
      for (std::size_t ch = 0; ch < c; ++ch) r(k * c + ch, k * c + ch) = std::polar(1.0, deg[k] * theta);
    return r;
  };
  double worst_masked = 0.0, worst_raw = 0.0;
  for (int s = 0; s < 32; ++s) {
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const auto ro = rot(theta, cout), ri = rot(theta, cin);
    worst_masked = std::max(worst_masked, support::frob_diff(matmul(ro, masked), matmul(masked, ri)));
    worst_raw = std::max(worst_raw, support::frob_diff(matmul(ro, w), matmul(w, ri)));
  }
  EXPECT_LE(worst_masked, 1e-12);
  EXPECT_GT(worst_raw, 1e-3);
  EXPECT_EQ(harmonic_mask(masked, deg, deg), masked);
}

TEST(HarmonicMask, PatternAndShapeChecks) {
  const auto keep = harmonic_mask_pattern(2, 4, {0, 1}, {1, 0});
  const std::vector<unsigned char> expect{0, 0, 1, 1, 1, 1, 0, 0};
  EXPECT_EQ(keep, expect);
  EXPECT_THROW(harmonic_mask(ComplexMatrix(3, 3), {0, 1}, {0, 1}), InvalidArgument);
}
