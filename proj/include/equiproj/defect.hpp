#ifndef EQUIPROJ_DEFECT_HPP
#define EQUIPROJ_DEFECT_HPP

// Equivariance-defect metrics and executable checks of the bounds relating
// them to the projection distance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "equiproj/errors.hpp"
#include "equiproj/group.hpp"
#include "equiproj/linalg.hpp"
#include "equiproj/random.hpp"
#include "equiproj/reynolds.hpp"

namespace equiproj {

/// Fixed-order pairwise summation.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  if (xs.size() == 1) return xs[0];
  const std::size_t mid = xs.size() / 2;
  return pairwise_sum(xs.subspan(0, mid)) + pairwise_sum(xs.subspan(mid));
}

struct DefectReport {
  std::vector<std::pair<Element, double>> per_element;
  double worst_case = 0.0;           ///< max over the group of ||Delta_g||
  double projection_distance = 0.0;  ///< ||W - P(W)||
  NormKind norm_kind = NormKind::spectral();
};

/// rep_out(g) W - W rep_in(g).
inline ComplexMatrix defect_operator(const LinearLayerSpec& layer, Element g) {
  if (g >= layer.group()->order())
    throw InvalidArgument("defect_at: element index " + std::to_string(g) + " out of range");
  return matmul(layer.rep_out()[g], layer.weight()) - matmul(layer.weight(), layer.rep_in()[g]);
}

inline double defect_at(const LinearLayerSpec& layer, Element g, const NormKind& kind) {
  return norm(defect_operator(layer, g), kind);
}

inline constexpr double kBoundSlack = 1e-9;

/// Exact worst case over the finite group. In the spectral norm the result
/// is checked against ||W-P(W)|| <= E(W) <= 2 ||W-P(W)|| before returning.
inline DefectReport worst_case_defect(const LinearLayerSpec& layer, const NormKind& kind) {
  DefectReport rep;
  rep.norm_kind = kind;
  for (Element g = 0; g < layer.group()->order(); ++g) {
    const double d = g == layer.group()->identity() ? 0.0 : defect_at(layer, g, kind);
    rep.per_element.emplace_back(g, d);
    rep.worst_case = std::max(rep.worst_case, d);
  }
  rep.projection_distance = norm(layer.weight() - project_finite(layer), kind);
  if (kind.tag() == NormKind::Tag::Spectral) {
    if (rep.projection_distance > rep.worst_case + kBoundSlack ||
        rep.worst_case > 2.0 * rep.projection_distance + kBoundSlack)
      throw BoundViolation("worst_case_defect: projection-distance sandwich violated (distance " +
                           std::to_string(rep.projection_distance) + ", worst case " +
                           std::to_string(rep.worst_case) + ")");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Empirical defect

using Point = std::array<double, 2>;

inline Point rotate_point(double angle, const Point& p) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p[0] - s * p[1], s * p[0] + c * p[1]};
}

/// Sum over samples k and group samples l of
///   || act_out(g_l, model(x_k)) - model(act_in(g_l, x_k)) ||_2.
/// model returns a std::vector<double>; a throw is re-raised as an
/// EvaluationError naming the (k, l) pair.
template <class Input, class Model, class ActIn, class ActOut>
double empirical_defect(Model&& model, const std::vector<Input>& inputs, std::span<const double> group_samples,
                        ActIn&& act_in, ActOut&& act_out) {
  if (group_samples.empty()) throw InvalidArgument("empirical_defect: no group samples");
  std::vector<double> terms;
  terms.reserve(inputs.size() * group_samples.size());
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t l = 0; l < group_samples.size(); ++l) {
      try {
        const std::vector<double> base = act_out(group_samples[l], model(inputs[k]));
        const std::vector<double> moved = model(act_in(group_samples[l], inputs[k]));
        if (base.size() != moved.size()) throw InvalidArgument("model output size changed");
        double s = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) s += (base[i] - moved[i]) * (base[i] - moved[i]);
        terms.push_back(std::sqrt(s));
      } catch (const EvaluationError&) {
        throw;
      } catch (const std::exception& e) {
        throw EvaluationError(std::string("empirical_defect: evaluation failed at sample ") +
                                  std::to_string(k) + ", rotation " + std::to_string(l) + ": " + e.what(),
                              k, l);
      }
    }
  }
  return pairwise_sum(terms);
}

/// Invariant scalar model under planar rotations:
///   sum_{k,l} |f(x_k) - f(R(theta_l) x_k)|.
template <class Model>
double empirical_invariance_defect(Model&& model, const std::vector<Point>& inputs, std::span<const double> angles) {
  return empirical_defect(
      [&](const Point& p) { return std::vector<double>{model(p)}; }, inputs, angles,
      [](double a, const Point& p) { return rotate_point(a, p); },
      [](double, std::vector<double> y) { return y; });
}

/// 16 evenly spaced angles followed by 16 seeded uniform draws from [0, 2 pi).
inline std::vector<double> default_rotation_samples(std::uint64_t seed, std::size_t even = 16, std::size_t random = 16) {
  std::vector<double> a;
  for (std::size_t k = 0; k < even; ++k)
    a.push_back(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(even));
  Rng rng(seed);
  for (std::size_t k = 0; k < random; ++k) a.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
  return a;
}

// ---------------------------------------------------------------------------
// Composition bounds

struct Activation {
  enum class Kind { Identity, Relu, Scaling };
  Kind kind = Kind::Identity;
  double scale = 1.0;

  static Activation identity() { return {Kind::Identity, 1.0}; }
  static Activation relu() { return {Kind::Relu, 1.0}; }
  static Activation scaling(double c) { return {Kind::Scaling, c}; }

  double lipschitz() const { return kind == Kind::Scaling ? std::abs(scale) : 1.0; }

  /// Relu acts on real parts and leaves imaginary parts alone.
  std::vector<Complex> apply(std::vector<Complex> x) const {
    switch (kind) {
      case Kind::Identity: break;
      case Kind::Relu:
        for (auto& z : x) z = Complex(std::max(0.0, z.real()), z.imag());
        break;
      case Kind::Scaling:
        for (auto& z : x) z *= scale;
        break;
    }
    return x;
  }
};

/// W_S o sigma_{S-1} o ... o sigma_1 o W_1.
class LayerChain {
 public:
  LayerChain(std::vector<LinearLayerSpec> layers, std::vector<Activation> activations)
      : layers_(std::move(layers)), activations_(std::move(activations)) {
    if (layers_.empty()) throw InvalidArgument("LayerChain: no layers");
    if (activations_.size() + 1 != layers_.size())
      throw InvalidArgument("LayerChain: need exactly one activation between consecutive layers");
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
      const auto& a = layers_[i].rep_out();
      const auto& b = layers_[i + 1].rep_in();
      if (!same_group(a.group(), b.group()) || a.dim() != b.dim())
        throw InvalidArgument("LayerChain: representation mismatch between stages " + std::to_string(i) +
                              " and " + std::to_string(i + 1));
      for (Element g = 0; g < a.group()->order(); ++g)
        if (max_abs_diff(a[g], b[g]) > kRepresentationTolerance)
          throw InvalidArgument("LayerChain: representation mismatch between stages " + std::to_string(i) +
                                " and " + std::to_string(i + 1));
      if (activations_[i].kind == Activation::Kind::Relu && !a.is_permutation())
        throw InvalidArgument("LayerChain: relu is only equivariant under permutation representations");
    }
  }

  const std::vector<LinearLayerSpec>& layers() const noexcept { return layers_; }
  const std::vector<Activation>& activations() const noexcept { return activations_; }
  const Representation& rep_in() const { return layers_.front().rep_in(); }
  const Representation& rep_out() const { return layers_.back().rep_out(); }

  bool is_linear() const {
    return std::none_of(activations_.begin(), activations_.end(),
                        [](const Activation& a) { return a.kind == Activation::Kind::Relu; });
  }

  /// Per-stage Lipschitz constants in composition order:
  /// ||W_1||_2, Lip(sigma_1), ||W_2||_2, ...
  std::vector<double> lipschitz() const {
    std::vector<double> l;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      l.push_back(norm(layers_[i].weight(), NormKind::spectral()));
      if (i < activations_.size()) l.push_back(activations_[i].lipschitz());
    }
    return l;
  }

  std::vector<Complex> apply(std::vector<Complex> x) const {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      x = detail::apply(layers_[i].weight(), x);
      if (i < activations_.size()) x = activations_[i].apply(std::move(x));
    }
    return x;
  }

  /// The composed matrix; only valid for linear chains.
  ComplexMatrix composed() const {
    if (!is_linear()) throw InvalidArgument("LayerChain::composed: chain contains relu");
    ComplexMatrix m = layers_.front().weight();
    for (std::size_t i = 1; i < layers_.size(); ++i) {
      if (activations_[i - 1].kind == Activation::Kind::Scaling) m *= activations_[i - 1].scale;
      m = matmul(layers_[i].weight(), m);
    }
    return m;
  }

 private:
  std::vector<LinearLayerSpec> layers_;
  std::vector<Activation> activations_;
};

struct ChainSampling {
  std::size_t samples_per_element = 64;
  std::uint64_t seed = 0;
};

/// Worst-case defect of the whole chain. Linear chains are evaluated exactly
/// in `kind`; chains containing relu are sampled with
///   max_g max_x ||rho_out(g) T(x) - T(rho_in(g) x)|| / ||x||,
/// a lower bound on the operator-norm defect.
inline double chain_defect(const LayerChain& chain, const NormKind& kind, ChainSampling sampling = {}) {
  if (chain.is_linear()) {
    const LinearLayerSpec whole(chain.composed(), chain.rep_in(), chain.rep_out());
    double e = 0.0;
    for (Element g = 0; g < whole.group()->order(); ++g) e = std::max(e, defect_at(whole, g, kind));
    return e;
  }
  Rng rng(sampling.seed);
  const auto& rin = chain.rep_in();
  const auto& rout = chain.rep_out();
  double worst = 0.0;
  for (Element g = 0; g < rin.group()->order(); ++g) {
    for (std::size_t s = 0; s < sampling.samples_per_element; ++s) {
      std::vector<Complex> x(rin.dim());
      for (auto& z : x) z = Complex(rng.normal(), rng.normal());
      const auto lhs = detail::apply(rout[g], chain.apply(x));
      const auto rhs = chain.apply(detail::apply(rin[g], x));
      double diff = 0.0;
      for (std::size_t i = 0; i < lhs.size(); ++i) diff += std::norm(lhs[i] - rhs[i]);
      worst = std::max(worst, std::sqrt(diff) / detail::vec_norm(x));
    }
  }
  return worst;
}

struct CompositionBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool sampled = false;  ///< lhs came from sampled inputs (relu present)
};

/// E(T) <= sum_i (prod_{m != i} L_m) E(f_i), with L_m the spectral norms of
/// the linear stages and the declared constants of the activations. The
/// activations are equivariant, so only linear stages contribute E(f_i).
inline CompositionBound composition_bound_check(const LayerChain& chain, const NormKind& kind,
                                                ChainSampling sampling = {}) {
  const std::vector<double> lip = chain.lipschitz();
  std::vector<double> stage_defect(lip.size(), 0.0);
  for (std::size_t i = 0; i < chain.layers().size(); ++i) {
    const auto& layer = chain.layers()[i];
    double e = 0.0;
    for (Element g = 0; g < layer.group()->order(); ++g) e = std::max(e, defect_at(layer, g, kind));
    stage_defect[2 * i] = e;
  }
  std::vector<double> terms;
  for (std::size_t i = 0; i < lip.size(); ++i) {
    if (stage_defect[i] == 0.0) continue;
    double prod = stage_defect[i];
    for (std::size_t m = 0; m < lip.size(); ++m)
      if (m != i) prod *= lip[m];
    terms.push_back(prod);
  }
  CompositionBound out;
  out.rhs = pairwise_sum(terms);
  out.lhs = chain_defect(chain, kind, sampling);
  out.sampled = !chain.is_linear();
  out.holds = out.lhs <= out.rhs + kBoundSlack;
  return out;
}

struct NetworkBound {
  double constant = 0.0;  ///< C = 2 (prod Lip(sigma_j)) max_k prod_{r != k} ||W_r||_2
  double lhs = 0.0;       ///< E(T)
  double rhs = 0.0;       ///< C sum_l ||W_l - P(W_l)||
  bool holds = false;
};

inline NetworkBound network_bound_constant(const LayerChain& chain, const NormKind& kind,
                                           ChainSampling sampling = {}) {
  std::vector<double> wnorm;
  for (const auto& l : chain.layers()) wnorm.push_back(norm(l.weight(), NormKind::spectral()));
  double act = 1.0;
  for (const auto& a : chain.activations()) act *= a.lipschitz();
  double best = 0.0;
  for (std::size_t k = 0; k < wnorm.size(); ++k) {
    double prod = 1.0;
    for (std::size_t r = 0; r < wnorm.size(); ++r)
      if (r != k) prod *= wnorm[r];
    best = std::max(best, prod);
  }
  NetworkBound out;
  out.constant = 2.0 * act * best;
  std::vector<double> dist;
  for (const auto& l : chain.layers()) dist.push_back(norm(l.weight() - project_finite(l), kind));
  out.rhs = out.constant * pairwise_sum(dist);
  out.lhs = chain_defect(chain, kind, sampling);
  out.holds = out.lhs <= out.rhs + kBoundSlack;
  return out;
}

// ---------------------------------------------------------------------------
// Convolution harness for C4 steerable kernels

/// Real feature map of shape [channels, 4, size, size].
struct FeatureMap {
  std::size_t channels = 0;
  std::size_t size = 0;
  std::vector<double> values;

  FeatureMap(std::size_t c, std::size_t s) : channels(c), size(s), values(c * 4 * s * s) {}
  double& operator()(std::size_t q, std::size_t a, std::size_t i, std::size_t j) {
    return values[((q * 4 + a) * size + i) * size + j];
  }
  double operator()(std::size_t q, std::size_t a, std::size_t i, std::size_t j) const {
    return values[((q * 4 + a) * size + i) * size + j];
  }
};

/// Cross-correlation with circular padding, summing over input channel and
/// input orientation:
///   y[p,a,i,j] = sum_{q,b,u,v} K[p,q,a,b,u,v] x[q,b,i+u-c,j+v-c].
inline FeatureMap c4_correlate(const SteerableKernel& k, const FeatureMap& x) {
  if (x.channels != k.c_in()) throw InvalidArgument("c4_correlate: channel mismatch");
  const std::size_t n = x.size, s = k.size(), c = (s - 1) / 2;
  FeatureMap y(k.c_out(), n);
  for (std::size_t p = 0; p < k.c_out(); ++p)
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double acc = 0.0;
          for (std::size_t q = 0; q < k.c_in(); ++q)
            for (std::size_t b = 0; b < 4; ++b)
              for (std::size_t u = 0; u < s; ++u) {
                const std::size_t ii = (i + u + n - c) % n;
                for (std::size_t v = 0; v < s; ++v) {
                  const std::size_t jj = (j + v + n - c) % n;
                  acc += k(p, q, a, b, u, v) * x(q, b, ii, jj);
                }
              }
          y(p, a, i, j) = acc;
        }
  return y;
}

/// (g_r x)[q, a, pos] = x[q, a - r, rot^-r(pos)]: spatial rotation together
/// with a cyclic orientation shift.
inline FeatureMap c4_act(const FeatureMap& x, int r) {
  FeatureMap y(x.channels, x.size);
  const int rr = ((r % 4) + 4) % 4;
  for (std::size_t q = 0; q < x.channels; ++q)
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t i = 0; i < x.size; ++i)
        for (std::size_t j = 0; j < x.size; ++j) {
          const auto [ri, rj] = rotate_index(i, j, x.size, rr);
          y(q, (a + static_cast<std::size_t>(rr)) % 4, ri, rj) = x(q, a, i, j);
        }
  return y;
}

/// max over r in {1,2,3} and random inputs of
///   ||g_r conv(x) - conv(g_r x)||_F / ||conv(x)||_F
/// on 16 x 16 circularly padded inputs.
inline double c4_conv_defect(const SteerableKernel& k, std::size_t trials, std::uint64_t seed,
                             std::size_t grid = 16) {
  if (trials == 0) throw InvalidArgument("c4_conv_defect: trials must be positive");
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    FeatureMap x(k.c_in(), grid);
    for (auto& v : x.values) v = rng.normal();
    const FeatureMap y = c4_correlate(k, x);
    double ny = 0.0;
    for (double v : y.values) ny += v * v;
    ny = std::sqrt(ny);
    for (int r = 1; r < 4; ++r) {
      const FeatureMap a = c4_act(y, r);
      const FeatureMap b = c4_correlate(k, c4_act(x, r));
      double d = 0.0;
      for (std::size_t i = 0; i < a.values.size(); ++i) d += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
      const double rel = ny == 0.0 ? std::sqrt(d) : std::sqrt(d) / ny;
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace equiproj

#endif  // EQUIPROJ_DEFECT_HPP
