#ifndef EQUIPROJ_AUTODIFF_HPP
#define EQUIPROJ_AUTODIFF_HPP

// Minimal reverse-mode tape over flat real arrays. Complex tensors are stored
// as interleaved (re, im) pairs; their adjoints use the same packing, so the
// adjoint of z is dL/dRe z + i dL/dIm z.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "equiproj/errors.hpp"
#include "equiproj/linalg.hpp"

namespace equiproj::ad {

using Var = std::size_t;

class Tape {
 public:
  /// Receives the node's adjoint and the tape, and accumulates into parents.
  using Backward = std::function<void(std::span<const double> adjoint, Tape& tape)>;

  Var leaf(std::vector<double> value) { return push(std::move(value), {}, nullptr); }

  Var record(std::vector<double> value, std::vector<Var> parents, Backward backward) {
    for (Var p : parents)
      if (p >= nodes_.size()) throw InvalidArgument("Tape::record: parent index out of range");
    return push(std::move(value), std::move(parents), std::move(backward));
  }

  const std::vector<double>& value(Var v) const { return nodes_.at(v).value; }
  const std::vector<double>& adjoint(Var v) const { return nodes_.at(v).adjoint; }
  std::vector<double>& adjoint_mut(Var v) { return nodes_.at(v).adjoint; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Seeds the scalar root with 1 and sweeps once in reverse order.
  void backward(Var root) {
    if (nodes_.at(root).value.size() != 1) throw InvalidArgument("Tape::backward: root must be scalar");
    for (auto& n : nodes_) std::fill(n.adjoint.begin(), n.adjoint.end(), 0.0);
    nodes_[root].adjoint[0] = 1.0;
    for (std::size_t i = root + 1; i-- > 0;) {
      const Node& n = nodes_[i];
      if (n.backward) {
        const std::vector<double> adj = n.adjoint;
        n.backward(adj, *this);
      }
    }
  }

 private:
  struct Node {
    std::vector<double> value;
    std::vector<double> adjoint;
    std::vector<Var> parents;
    Backward backward;
  };

  Var push(std::vector<double> value, std::vector<Var> parents, Backward backward) {
    Node n;
    n.adjoint.assign(value.size(), 0.0);
    n.value = std::move(value);
    n.parents = std::move(parents);
    n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Packing helpers

inline std::vector<double> pack(const ComplexMatrix& m) {
  std::vector<double> out(2 * m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    out[2 * k] = m.data()[k].real();
    out[2 * k + 1] = m.data()[k].imag();
  }
  return out;
}

inline ComplexMatrix unpack(std::span<const double> v, std::size_t rows, std::size_t cols) {
  if (v.size() != 2 * rows * cols) throw InvalidArgument("unpack: size mismatch");
  ComplexMatrix m(rows, cols);
  for (std::size_t k = 0; k < rows * cols; ++k) m.data()[k] = Complex(v[2 * k], v[2 * k + 1]);
  return m;
}

inline void accumulate(std::vector<double>& dst, const ComplexMatrix& g) {
  for (std::size_t k = 0; k < g.size(); ++k) {
    dst[2 * k] += g.data()[k].real();
    dst[2 * k + 1] += g.data()[k].imag();
  }
}

// ---------------------------------------------------------------------------
// Operations

/// Complex product Y = W X with W (r x c) and X (c x n). Adjoints:
/// G_W = G_Y X^H, G_X = W^H G_Y.
inline Var cmatmul(Tape& t, Var w, std::size_t r, std::size_t c, Var x, std::size_t n) {
  const ComplexMatrix W = unpack(t.value(w), r, c);
  const ComplexMatrix X = unpack(t.value(x), c, n);
  return t.record(pack(matmul(W, X)), {w, x}, [w, x, r, c, n](std::span<const double> adj, Tape& tp) {
    const ComplexMatrix G = unpack(adj, r, n);
    const ComplexMatrix W = unpack(tp.value(w), r, c);
    const ComplexMatrix X = unpack(tp.value(x), c, n);
    accumulate(tp.adjoint_mut(w), matmul(G, conj_transpose(X)));
    accumulate(tp.adjoint_mut(x), matmul(conj_transpose(W), G));
  });
}

/// Real part of the degree-0 channelwise self tensor product:
///   out[c, b] = Re sum_m h[m, c, b] h[-m, c, b]
/// for h laid out as ((2M+1) * channels) x batch, degree-major.
inline Var degree0_product(Tape& t, Var h, int max_degree, std::size_t channels, std::size_t batch) {
  const std::size_t deg = static_cast<std::size_t>(2 * max_degree + 1);
  const ComplexMatrix H = unpack(t.value(h), deg * channels, batch);
  std::vector<double> out(channels * batch, 0.0);
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t b = 0; b < batch; ++b) {
      Complex s{};
      for (std::size_t m = 0; m < deg; ++m) s += H(m * channels + c, b) * H((deg - 1 - m) * channels + c, b);
      out[c * batch + b] = s.real();
    }
  return t.record(std::move(out), {h}, [h, deg, channels, batch](std::span<const double> adj, Tape& tp) {
    const ComplexMatrix H = unpack(tp.value(h), deg * channels, batch);
    ComplexMatrix G(deg * channels, batch);
    for (std::size_t m = 0; m < deg; ++m)
      for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t b = 0; b < batch; ++b)
          G(m * channels + c, b) = 2.0 * adj[c * batch + b] * std::conj(H((deg - 1 - m) * channels + c, b));
    accumulate(tp.adjoint_mut(h), G);
  });
}

/// z[b] = sum_c w[c] x[c, b] + bias, all real.
inline Var linear_head(Tape& t, Var w, Var bias, Var x, std::size_t channels, std::size_t batch) {
  const auto& W = t.value(w);
  const auto& X = t.value(x);
  const double b0 = t.value(bias)[0];
  std::vector<double> z(batch, b0);
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t b = 0; b < batch; ++b) z[b] += W[c] * X[c * batch + b];
  return t.record(std::move(z), {w, bias, x}, [w, bias, x, channels, batch](std::span<const double> adj, Tape& tp) {
    const auto& W = tp.value(w);
    const auto& X = tp.value(x);
    auto& gw = tp.adjoint_mut(w);
    auto& gx = tp.adjoint_mut(x);
    double gb = 0.0;
    for (std::size_t b = 0; b < batch; ++b) gb += adj[b];
    tp.adjoint_mut(bias)[0] += gb;
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t b = 0; b < batch; ++b) {
        gw[c] += adj[b] * X[c * batch + b];
        gx[c * batch + b] += adj[b] * W[c];
      }
  });
}

inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Mean binary cross-entropy with logits, targets in {0, 1}.
inline Var bce_with_logits(Tape& t, Var z, std::vector<double> targets) {
  const auto& Z = t.value(z);
  if (Z.size() != targets.size() || Z.empty()) throw InvalidArgument("bce_with_logits: size mismatch");
  double s = 0.0;
  for (std::size_t b = 0; b < Z.size(); ++b) s += targets[b] * softplus(-Z[b]) + (1.0 - targets[b]) * softplus(Z[b]);
  const double inv = 1.0 / static_cast<double>(Z.size());
  return t.record({s * inv}, {z}, [z, inv, targets = std::move(targets)](std::span<const double> adj, Tape& tp) {
    const auto& Z = tp.value(z);
    auto& g = tp.adjoint_mut(z);
    for (std::size_t b = 0; b < Z.size(); ++b) g[b] += adj[0] * inv * (sigmoid(Z[b]) - targets[b]);
  });
}

/// norm(keep ? W : 0) for a complex matrix variable; an empty `keep` selects
/// every entry.
inline Var masked_norm(Tape& t, Var w, std::size_t r, std::size_t c, const NormKind& kind,
                       std::vector<unsigned char> keep = {}) {
  if (!keep.empty() && keep.size() != r * c) throw InvalidArgument("masked_norm: mask size mismatch");
  ComplexMatrix W = unpack(t.value(w), r, c);
  if (!keep.empty())
    for (std::size_t k = 0; k < keep.size(); ++k)
      if (!keep[k]) W.data()[k] = Complex{};
  ComplexMatrix G = norm_gradient(W, kind);
  if (!keep.empty())
    for (std::size_t k = 0; k < keep.size(); ++k)
      if (!keep[k]) G.data()[k] = Complex{};
  return t.record({norm(W, kind)}, {w}, [w, G = std::move(G)](std::span<const double> adj, Tape& tp) {
    ComplexMatrix scaled = G;
    scaled *= Complex(adj[0], 0.0);
    accumulate(tp.adjoint_mut(w), scaled);
  });
}

/// sum_i coeffs[i] * xs[i] over scalar variables.
inline Var weighted_sum(Tape& t, std::vector<Var> xs, std::vector<double> coeffs) {
  if (xs.size() != coeffs.size()) throw InvalidArgument("weighted_sum: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (t.value(xs[i]).size() != 1) throw InvalidArgument("weighted_sum: operands must be scalar");
    s += coeffs[i] * t.value(xs[i])[0];
  }
  std::vector<Var> parents = xs;
  return t.record({s}, std::move(parents), [xs = std::move(xs), coeffs = std::move(coeffs)](std::span<const double> adj, Tape& tp) {
    for (std::size_t i = 0; i < xs.size(); ++i) tp.adjoint_mut(xs[i])[0] += coeffs[i] * adj[0];
  });
}

}  // namespace equiproj::ad

#endif  // EQUIPROJ_AUTODIFF_HPP
