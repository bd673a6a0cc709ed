#ifndef EQUIPROJ_TOY_HPP
#define EQUIPROJ_TOY_HPP

// Approximately SO(2)-invariant toy classifier on planar points: circular
// harmonic embedding, two complex linear layers, a channelwise tensor
// product reduced to degree 0, and a real linear head. Trained with a
// projection-regularised objective and Adam.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "equiproj/autodiff.hpp"
#include "equiproj/defect.hpp"
#include "equiproj/errors.hpp"
#include "equiproj/linalg.hpp"
#include "equiproj/random.hpp"
#include "equiproj/spectral.hpp"

namespace equiproj {

struct ToyArchitecture {
  int max_degree = 4;
  std::size_t channels = 4;
  std::size_t hidden = 8;
  double radial_width = 0.5;

  std::size_t degrees() const { return static_cast<std::size_t>(2 * max_degree + 1); }
  std::size_t in_dim() const { return degrees() * channels; }
  std::size_t hid_dim() const { return degrees() * hidden; }

  /// Evenly spaced c_n = 4 (n - 1) / (C - 1).
  std::vector<double> radial_centers() const {
    std::vector<double> c(channels, 0.0);
    if (channels > 1)
      for (std::size_t n = 0; n < channels; ++n) c[n] = 4.0 * static_cast<double>(n) / static_cast<double>(channels - 1);
    return c;
  }

  void validate() const {
    if (max_degree < 0 || channels == 0 || hidden == 0 || !(radial_width > 0.0))
      throw InvalidArgument("ToyArchitecture: invalid dimensions");
  }
};

struct ToyModelParams {
  ToyArchitecture arch;
  ComplexMatrix w1;  ///< hid_dim x in_dim
  ComplexMatrix w2;  ///< hid_dim x hid_dim
  std::vector<double> w_final;
  double bias = 0.0;

  explicit ToyModelParams(ToyArchitecture a = {})
      : arch(a), w1(a.hid_dim(), a.in_dim()), w2(a.hid_dim(), a.hid_dim()), w_final(a.hidden, 0.0) {
    arch.validate();
  }

  void check() const {
    if (w1.rows() != arch.hid_dim() || w1.cols() != arch.in_dim() || w2.rows() != arch.hid_dim() ||
        w2.cols() != arch.hid_dim() || w_final.size() != arch.hidden)
      throw InvalidArgument("ToyModelParams: shapes inconsistent with architecture");
  }

  std::size_t flat_size() const { return 2 * (w1.size() + w2.size()) + w_final.size() + 1; }

  /// w1, w2 as interleaved (re, im) pairs, then w_final, then bias.
  std::vector<double> to_flat() const {
    std::vector<double> out = ad::pack(w1);
    const auto b = ad::pack(w2);
    out.insert(out.end(), b.begin(), b.end());
    out.insert(out.end(), w_final.begin(), w_final.end());
    out.push_back(bias);
    return out;
  }

  void from_flat(std::span<const double> v) {
    if (v.size() != flat_size()) throw InvalidArgument("ToyModelParams::from_flat: size mismatch");
    std::size_t o = 0;
    w1 = ad::unpack(v.subspan(o, 2 * w1.size()), w1.rows(), w1.cols());
    o += 2 * w1.size();
    w2 = ad::unpack(v.subspan(o, 2 * w2.size()), w2.rows(), w2.cols());
    o += 2 * w2.size();
    std::copy(v.begin() + static_cast<std::ptrdiff_t>(o), v.begin() + static_cast<std::ptrdiff_t>(o + w_final.size()),
              w_final.begin());
    bias = v[v.size() - 1];
  }

  std::vector<int> degrees() const { return harmonic_degrees(arch.max_degree); }

  /// Replace w1 and w2 by their degree masks.
  void project() {
    w1 = harmonic_mask(w1, degrees(), degrees());
    w2 = harmonic_mask(w2, degrees(), degrees());
  }
};

/// Entries uniform in [-a, a] (real and imaginary parts independently),
/// a = 1/sqrt(fan_in); bias zero.
inline ToyModelParams init_toy_params(const ToyArchitecture& arch, std::uint64_t seed) {
  ToyModelParams p(arch);
  Rng rng(seed);
  const auto fill = [&](ComplexMatrix& m) {
    const double a = 1.0 / std::sqrt(static_cast<double>(m.cols()));
    for (auto& z : m.data()) {
      const double re = rng.uniform(-a, a);
      z = Complex(re, rng.uniform(-a, a));
    }
  };
  fill(p.w1);
  fill(p.w2);
  const double a = 1.0 / std::sqrt(static_cast<double>(arch.hidden));
  for (auto& w : p.w_final) w = rng.uniform(-a, a);
  return p;
}

/// H[m][n] = b_n(r) zhat^m, m = -M..M, as a (2M+1) x C matrix; zhat = 1 at r = 0.
inline ComplexMatrix embed(const Point& p, const ToyArchitecture& arch) {
  if (!std::isfinite(p[0]) || !std::isfinite(p[1])) throw InvalidArgument("embed: non-finite coordinates");
  const Complex z(p[0], p[1]);
  const double r = std::abs(z);
  const Complex zhat = r == 0.0 ? Complex(1.0, 0.0) : z / r;
  const auto centers = arch.radial_centers();
  const int M = arch.max_degree;
  std::vector<Complex> pw(static_cast<std::size_t>(M) + 1, Complex(1.0, 0.0));
  for (int m = 1; m <= M; ++m) pw[static_cast<std::size_t>(m)] = pw[static_cast<std::size_t>(m - 1)] * zhat;
  ComplexMatrix h(arch.degrees(), arch.channels);
  for (int m = -M; m <= M; ++m) {
    const Complex ph = m >= 0 ? pw[static_cast<std::size_t>(m)] : std::conj(pw[static_cast<std::size_t>(-m)]);
    for (std::size_t n = 0; n < arch.channels; ++n) {
      const double d = r - centers[n];
      h(static_cast<std::size_t>(m + M), n) = std::exp(-d * d / (2.0 * arch.radial_width * arch.radial_width)) * ph;
    }
  }
  return h;
}

/// Embeddings of a batch as an in_dim x batch matrix (one column per point).
inline ComplexMatrix embed_batch(const std::vector<Point>& pts, const ToyArchitecture& arch) {
  ComplexMatrix x(arch.in_dim(), pts.size());
  for (std::size_t b = 0; b < pts.size(); ++b) {
    const ComplexMatrix h = embed(pts[b], arch);
    for (std::size_t k = 0; k < h.size(); ++k) x(k, b) = h.data()[k];
  }
  return x;
}

struct TrainConfig {
  double lambda_g = 0.0;
  double lambda_perp = 0.0;
  NormKind norm_kind = NormKind::frobenius();
  double lr = 0.003;
  int epochs = 200;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  std::size_t hidden = 8;
  bool hard_projection = false;  ///< project w1, w2 after every step
  int log_every = 20;

  void validate() const {
    if (!(lambda_g >= 0.0) || !(lambda_perp >= 0.0)) throw InvalidArgument("TrainConfig: lambdas must be >= 0");
    if (!(lr > 0.0) || epochs <= 0 || hidden == 0 || log_every <= 0)
      throw InvalidArgument("TrainConfig: lr, epochs, hidden and log_every must be positive");
  }
};

/// Handles for one forward graph.
struct ToyGraph {
  ad::Tape tape;
  ad::Var w1 = 0, w2 = 0, w_final = 0, bias = 0;
  ad::Var logits = 0;
};

inline ToyGraph build_forward(const ToyModelParams& p, const std::vector<Point>& pts) {
  p.check();
  if (pts.empty()) throw InvalidArgument("forward: empty batch");
  ToyGraph g;
  const auto& a = p.arch;
  const std::size_t n = pts.size();
  g.w1 = g.tape.leaf(ad::pack(p.w1));
  g.w2 = g.tape.leaf(ad::pack(p.w2));
  g.w_final = g.tape.leaf(p.w_final);
  g.bias = g.tape.leaf({p.bias});
  const ad::Var x = g.tape.leaf(ad::pack(embed_batch(pts, a)));
  const ad::Var h1 = ad::cmatmul(g.tape, g.w1, a.hid_dim(), a.in_dim(), x, n);
  const ad::Var h2 = ad::cmatmul(g.tape, g.w2, a.hid_dim(), a.hid_dim(), h1, n);
  const ad::Var f = ad::degree0_product(g.tape, h2, a.max_degree, a.hidden, n);
  g.logits = ad::linear_head(g.tape, g.w_final, g.bias, f, a.hidden, n);
  return g;
}

inline std::vector<double> forward_batch(const ToyModelParams& p, const std::vector<Point>& pts) {
  if (pts.empty()) return {};
  const ToyGraph g = build_forward(p, pts);
  return g.tape.value(g.logits);
}

inline double forward(const Point& pt, const ToyModelParams& p) { return forward_batch(p, {pt})[0]; }

struct LossBreakdown {
  double total = 0.0;
  double task = 0.0;
  double penalty_g = 0.0;     ///< sum_i ||W_i||
  double penalty_perp = 0.0;  ///< sum_i ||W_i - M.W_i||
  std::vector<double> gradient;  ///< flat, same layout as to_flat()
};

/// Mean BCE + lambda_g sum ||W_i|| + lambda_perp sum ||W_i - M.W_i|| over
/// W_i in {w1, w2}. Labels are +-1.
inline LossBreakdown loss_and_gradient(const ToyModelParams& p, const std::vector<Point>& pts,
                                       const std::vector<int>& labels, const TrainConfig& cfg) {
  if (pts.empty()) throw InvalidArgument("loss: empty batch");
  if (pts.size() != labels.size()) throw InvalidArgument("loss: points and labels differ in length");
  ToyGraph g = build_forward(p, pts);
  auto& t = g.tape;
  std::vector<double> targets(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1 && labels[i] != -1) throw InvalidArgument("loss: labels must be +1 or -1");
    targets[i] = labels[i] == 1 ? 1.0 : 0.0;
  }
  const auto& a = p.arch;
  const auto deg = p.degrees();
  std::vector<unsigned char> off1 = harmonic_mask_pattern(a.hid_dim(), a.in_dim(), deg, deg);
  std::vector<unsigned char> off2 = harmonic_mask_pattern(a.hid_dim(), a.hid_dim(), deg, deg);
  for (auto& k : off1) k = static_cast<unsigned char>(1 - k);
  for (auto& k : off2) k = static_cast<unsigned char>(1 - k);

  const ad::Var task = ad::bce_with_logits(t, g.logits, std::move(targets));
  const ad::Var n1 = ad::masked_norm(t, g.w1, a.hid_dim(), a.in_dim(), cfg.norm_kind);
  const ad::Var n2 = ad::masked_norm(t, g.w2, a.hid_dim(), a.hid_dim(), cfg.norm_kind);
  const ad::Var p1 = ad::masked_norm(t, g.w1, a.hid_dim(), a.in_dim(), cfg.norm_kind, std::move(off1));
  const ad::Var p2 = ad::masked_norm(t, g.w2, a.hid_dim(), a.hid_dim(), cfg.norm_kind, std::move(off2));
  const ad::Var total =
      ad::weighted_sum(t, {task, n1, n2, p1, p2}, {1.0, cfg.lambda_g, cfg.lambda_g, cfg.lambda_perp, cfg.lambda_perp});
  t.backward(total);

  LossBreakdown out;
  out.total = t.value(total)[0];
  out.task = t.value(task)[0];
  out.penalty_g = t.value(n1)[0] + t.value(n2)[0];
  out.penalty_perp = t.value(p1)[0] + t.value(p2)[0];
  out.gradient = t.adjoint(g.w1);
  for (ad::Var v : {g.w2, g.w_final, g.bias}) out.gradient.insert(out.gradient.end(), t.adjoint(v).begin(), t.adjoint(v).end());
  return out;
}

inline double loss(const ToyModelParams& p, const std::vector<Point>& pts, const std::vector<int>& labels,
                   const TrainConfig& cfg) {
  return loss_and_gradient(p, pts, labels, cfg).total;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamState {
  std::vector<double> m, v;
  long step = 0;
};

/// One bias-corrected Adam update, elementwise over the flat parameters.
inline void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& st,
                      const TrainConfig& cfg) {
  if (params.size() != grads.size()) throw InvalidArgument("adam_step: parameter/gradient size mismatch");
  if (st.m.empty()) {
    st.m.assign(params.size(), 0.0);
    st.v.assign(params.size(), 0.0);
  }
  if (st.m.size() != params.size()) throw InvalidArgument("adam_step: state size mismatch");
  ++st.step;
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(st.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    st.m[i] = cfg.adam_beta1 * st.m[i] + (1.0 - cfg.adam_beta1) * grads[i];
    st.v[i] = cfg.adam_beta2 * st.v[i] + (1.0 - cfg.adam_beta2) * grads[i] * grads[i];
    const double mh = st.m[i] / c1;
    const double vh = st.v[i] / c2;
    params[i] -= cfg.lr * mh / (std::sqrt(vh) + cfg.adam_eps);
  }
}

// ---------------------------------------------------------------------------
// Datasets

struct ToyDataset {
  std::vector<Point> points;
  std::vector<int> labels;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;

  std::vector<Point> points_of(const std::vector<std::size_t>& idx) const {
    std::vector<Point> out;
    for (auto i : idx) out.push_back(points.at(i));
    return out;
  }
  std::vector<int> labels_of(const std::vector<std::size_t>& idx) const {
    std::vector<int> out;
    for (auto i : idx) out.push_back(labels.at(i));
    return out;
  }
};

namespace detail {

/// Seeded Fisher-Yates shuffle, first 80% (rounded down) train.
inline void split_80_20(ToyDataset& d, Rng& rng) {
  std::vector<std::size_t> idx(d.points.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
  const std::size_t n_train = idx.size() * 4 / 5;
  d.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  d.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(d.train.begin(), d.train.end());
  std::sort(d.test.begin(), d.test.end());
}

inline Point polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

}  // namespace detail

/// Inner disk (+1): r ~ U[0,1], theta ~ U[0, 2pi). Outer sector (-1):
/// r ~ U[2.3, 3], theta ~ U[-pi/4, pi/4).
inline ToyDataset gen_disk_annulus(std::size_t n_per_class, std::uint64_t seed) {
  if (n_per_class == 0) throw InvalidArgument("gen_disk_annulus: n_per_class must be positive");
  Rng rng(seed);
  ToyDataset d;
  constexpr double pi = std::numbers::pi;
  for (std::size_t i = 0; i < n_per_class; ++i) {
    const double r = rng.uniform(0.0, 1.0);
    d.points.push_back(detail::polar(r, rng.uniform(0.0, 2.0 * pi)));
    d.labels.push_back(1);
  }
  for (std::size_t i = 0; i < n_per_class; ++i) {
    const double r = rng.uniform(2.3, 3.0);
    d.points.push_back(detail::polar(r, rng.uniform(-pi / 4.0, pi / 4.0)));
    d.labels.push_back(-1);
  }
  detail::split_80_20(d, rng);
  return d;
}

struct WaveyRingsShape {
  double r_in = 1.1;
  double r_out = 2.2;
  double frequency = 5.0;
  double b_in = 0.15;
  double b_out = 0.22;
};

/// r_+- = r_in/out + sigma_perp sin(f theta) + U[-b, b]; negative radii are
/// kept, which reflects the point through the origin.
inline ToyDataset gen_wavey_rings(std::size_t n_per_class, double sigma_perp, std::uint64_t seed,
                                  WaveyRingsShape shape = {}) {
  if (n_per_class == 0) throw InvalidArgument("gen_wavey_rings: n_per_class must be positive");
  if (!(sigma_perp >= 0.0)) throw InvalidArgument("gen_wavey_rings: sigma_perp must be >= 0");
  Rng rng(seed);
  ToyDataset d;
  constexpr double pi = std::numbers::pi;
  for (int cls : {1, -1}) {
    const double base = cls == 1 ? shape.r_in : shape.r_out;
    const double b = cls == 1 ? shape.b_in : shape.b_out;
    for (std::size_t i = 0; i < n_per_class; ++i) {
      const double theta = rng.uniform(0.0, 2.0 * pi);
      const double r = base + sigma_perp * std::sin(shape.frequency * theta) + rng.uniform(-b, b);
      d.points.push_back(detail::polar(r, theta));
      d.labels.push_back(cls);
    }
  }
  detail::split_80_20(d, rng);
  return d;
}

// ---------------------------------------------------------------------------
// Training

struct HistoryRow {
  int epoch = 0;
  double task_loss = 0.0;
  double penalty_g = 0.0;
  double penalty_perp = 0.0;
  double test_accuracy = 0.0;
  double empirical_defect = 0.0;

  friend bool operator==(const HistoryRow&, const HistoryRow&) = default;
};

struct TrainResult {
  ToyModelParams params;
  std::vector<HistoryRow> history;
  double train_accuracy = 0.0;
  std::size_t defect_points = 0;     ///< sample count k behind empirical_defect
  std::size_t defect_rotations = 0;  ///< rotation count l behind empirical_defect
};

inline double accuracy(const ToyModelParams& p, const std::vector<Point>& pts, const std::vector<int>& labels) {
  if (pts.empty()) return 0.0;
  const auto z = forward_batch(p, pts);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < z.size(); ++i) ok += ((z[i] >= 0.0) == (labels[i] == 1)) ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(pts.size());
}

/// Unnormalised sum over points and rotations of |f(x) - f(R x)|.
inline double toy_empirical_defect(const ToyModelParams& p, const std::vector<Point>& pts,
                                   std::span<const double> angles) {
  return empirical_invariance_defect([&](const Point& x) { return forward(x, p); }, pts, angles);
}

/// Full-batch training on the train split. History rows are written every
/// cfg.log_every epochs and after the last epoch; the empirical defect is
/// measured on the test split with 32 rotations.
inline TrainResult train_toy(const ToyDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.train.empty()) throw InvalidArgument("train_toy: empty training split");
  ToyArchitecture arch;
  arch.hidden = cfg.hidden;
  ToyModelParams params = init_toy_params(arch, cfg.seed);
  if (cfg.hard_projection) params.project();

  const auto xs = data.points_of(data.train);
  const auto ys = data.labels_of(data.train);
  const auto xt = data.points_of(data.test);
  const auto yt = data.labels_of(data.test);
  const auto defect_pts = xt.empty() ? xs : xt;
  const auto angles = default_rotation_samples(cfg.seed);

  TrainResult res{params, {}, 0.0, defect_pts.size(), angles.size()};
  AdamState st;
  std::vector<double> flat = params.to_flat();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const LossBreakdown lb = loss_and_gradient(params, xs, ys, cfg);
    const bool finite = std::isfinite(lb.total) &&
                        std::all_of(lb.gradient.begin(), lb.gradient.end(), [](double v) { return std::isfinite(v); });
    if (!finite)
      throw TrainingDiverged("train_toy: non-finite loss at epoch " + std::to_string(epoch), epoch - 1);
    adam_step(flat, lb.gradient, st, cfg);
    params.from_flat(flat);
    if (cfg.hard_projection) {
      params.project();
      flat = params.to_flat();
    }
    if (epoch % cfg.log_every == 0 || epoch == cfg.epochs) {
      const LossBreakdown now = loss_and_gradient(params, xs, ys, cfg);
      if (!std::isfinite(now.total))
        throw TrainingDiverged("train_toy: non-finite loss at epoch " + std::to_string(epoch), epoch - 1);
      HistoryRow row;
      row.epoch = epoch;
      row.task_loss = now.task;
      row.penalty_g = now.penalty_g;
      row.penalty_perp = now.penalty_perp;
      row.test_accuracy = accuracy(params, xt, yt);
      row.empirical_defect = toy_empirical_defect(params, defect_pts, angles);
      res.history.push_back(row);
    }
  }
  res.params = params;
  res.train_accuracy = accuracy(params, xs, ys);
  return res;
}

}  // namespace equiproj

#endif  // EQUIPROJ_TOY_HPP
