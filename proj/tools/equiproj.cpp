// equiproj command-line driver.
//
//   equiproj <command> [--config file.json] [--flag value ...]
//
// Commands: project, kernel-project, defect, verify-bounds, train, sweep.
// Exit codes: 0 ok, 1 verification violation, 2 input error, 3 math error,
// 4 divergence.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "equiproj/equiproj.hpp"

namespace fs = std::filesystem;
using namespace equiproj;

namespace {

enum Exit : int { kOk = 0, kViolation = 1, kInput = 2, kMath = 3, kDiverged = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

GroupPtr parse_group(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("group must be cyclic:n or dihedral:n, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  std::size_t n = 0;
  try {
    std::size_t used = 0;
    n = std::stoul(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("invalid group order in '" + spec + "'");
  }
  if (kind == "cyclic") return make_cyclic(n);
  if (kind == "dihedral") return make_dihedral(n);
  throw UsageError("unknown group family '" + kind + "'");
}

bool is_cyclic(const GroupPtr& g) { return *g == *make_cyclic(g->order()); }

/// "regular": copies of the regular representation with coordinates (x, v),
/// v fastest; "trivial": dim copies of the trivial representation.
Representation parse_rep(const std::string& kind, const GroupPtr& g, std::size_t dim) {
  if (kind == "trivial") {
    if (dim == 0) throw UsageError("empty representation");
    return direct_sum(std::vector<Representation>(dim, trivial_representation(g)));
  }
  if (kind == "regular") {
    if (dim == 0 || dim % g->order() != 0)
      throw UsageError("dimension " + std::to_string(dim) + " is not a multiple of |G| = " +
                       std::to_string(g->order()));
    const std::size_t k = dim / g->order();
    return induced_representation(direct_sum(std::vector<Representation>(k, trivial_representation(g))));
  }
  throw UsageError("representation must be 'regular' or 'trivial', got '" + kind + "'");
}

std::vector<double> parse_grid(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    try {
      out.push_back(io::parse_double(item));
    } catch (const io::FormatError&) {
      throw UsageError(std::string("invalid value '") + item + "' in " + what);
    }
  }
  return out;
}

std::string csv_line(std::initializer_list<double> xs) {
  std::string s;
  for (double x : xs) s += (s.empty() ? "" : ",") + io::fmt(x);
  return s;
}

// ---------------------------------------------------------------------------
// Config file: each JSON key becomes the flag --key (underscores as dashes)
// ahead of the command-line flags, so explicit flags win.

std::vector<std::string> config_args(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      if (!value.is_string() || value.get<std::string>() != command)
        throw UsageError("config is for a different command");
      continue;
    }
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_number_integer()) {
      args.push_back(flag);
      args.push_back(std::to_string(value.get<long long>()));
    } else if (value.is_number()) {
      args.push_back(flag);
      args.push_back(io::fmt(value.get<double>()));
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ',';
        if (v.is_number_integer()) joined += std::to_string(v.get<long long>());
        else if (v.is_number()) joined += io::fmt(v.get<double>());
        else throw UsageError("config key '" + key + "' must hold numbers");
      }
      args.push_back(flag);
      args.push_back(joined);
    } else {
      throw UsageError("unsupported value for config key '" + key + "'");
    }
  }
  return args;
}

// ---------------------------------------------------------------------------
// project / kernel-project / defect

struct MatrixOptions {
  std::string input, output, group = "cyclic:1", rep_in = "regular", rep_out = "regular";
  std::string method = "finite", check_method, norm = "spectral";
};

ComplexMatrix project_with(const std::string& method, const ComplexMatrix& t, const GroupPtr& g,
                           const Representation& in, const Representation& out, const MatrixOptions& o) {
  if (method == "finite") return project_finite(LinearLayerSpec(t, in, out));
  if (method != "circulant" && method != "spectral") throw UsageError("unknown method '" + method + "'");
  if (o.rep_in != "regular" || o.rep_out != "regular")
    throw UsageError("method '" + method + "' needs regular representations on both sides");
  if (!is_cyclic(g)) throw UsageError("method '" + method + "' is only available for cyclic groups");
  if (method == "circulant") {
    if (t.rows() != g->order() || t.cols() != g->order())
      throw UsageError("circulant method needs a |G| x |G| matrix");
    return project_equivariant_circulant(t);
  }
  const auto triv = trivial_representation(g);
  const auto fin = direct_sum(std::vector<Representation>(t.cols() / g->order(), triv));
  const auto fout = direct_sum(std::vector<Representation>(t.rows() / g->order(), triv));
  return project_equivariant_spectral(t, cyclic_irreps(g->order()), fin, fout);
}

int cmd_project(const MatrixOptions& o) {
  const auto g = parse_group(o.group);
  const NormKind kind = NormKind::parse(o.norm);
  const ComplexMatrix t = io::read_matrix(o.input);
  const auto in = parse_rep(o.rep_in, g, t.cols());
  const auto out = parse_rep(o.rep_out, g, t.rows());
  const ComplexMatrix p = project_with(o.method, t, g, in, out, o);
  if (!o.output.empty()) io::write_matrix(o.output, p);
  const auto rep = worst_case_defect(LinearLayerSpec(p, in, out), kind);
  std::cout << csv_line({norm(t, kind), norm(p, kind), norm(t - p, kind), rep.worst_case}) << '\n';
  if (!o.check_method.empty()) {
    const ComplexMatrix q = project_with(o.check_method, t, g, in, out, o);
    const double diff = max_abs_diff(p, q);
    std::cout << "agreement," << o.method << ',' << o.check_method << ',' << io::fmt(diff) << '\n';
    if (diff > 1e-11) {
      std::cerr << "error: " << o.method << " and " << o.check_method << " projections differ by " << diff << '\n';
      return kViolation;
    }
  }
  return kOk;
}

int cmd_defect(const MatrixOptions& o) {
  const auto g = parse_group(o.group);
  const NormKind kind = NormKind::parse(o.norm);
  const ComplexMatrix t = io::read_matrix(o.input);
  const LinearLayerSpec layer(t, parse_rep(o.rep_in, g, t.cols()), parse_rep(o.rep_out, g, t.rows()));
  const auto rep = worst_case_defect(layer, kind);
  if (o.output.empty()) {
    io::write_defect_csv(std::cout, rep);
  } else {
    std::ofstream f(o.output, std::ios::binary);
    if (!f) throw io::FormatError("cannot open '" + o.output + "' for writing");
    io::write_defect_csv(f, rep);
  }
  return kOk;
}

struct KernelOptions {
  std::string input, output;
  std::size_t trials = 2;
  std::uint64_t seed = 0;
};

int cmd_kernel_project(const KernelOptions& o) {
  const SteerableKernel k = io::read_kernel(o.input);
  const SteerableKernel p = project_c4_kernel(k);
  if (!o.output.empty()) io::write_kernel(o.output, p);
  double nk = 0.0, np = 0.0, nd = 0.0;
  for (std::size_t i = 0; i < k.values().size(); ++i) {
    nk += k.values()[i] * k.values()[i];
    np += p.values()[i] * p.values()[i];
    nd += (k.values()[i] - p.values()[i]) * (k.values()[i] - p.values()[i]);
  }
  const double conv = o.trials == 0 ? 0.0 : c4_conv_defect(p, o.trials, o.seed);
  std::cout << csv_line({std::sqrt(nk), std::sqrt(np), std::sqrt(nd), conv}) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// verify-bounds

struct VerifyOptions {
  std::string group = "cyclic:4";
  std::size_t trials = 1000;
  std::size_t composition_trials = 200;
  std::uint64_t seed = 0;
};

struct SuiteTally {
  std::string name;
  std::size_t trials = 0, passed = 0, skipped = 0;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  std::vector<std::uint64_t> failing_seeds;

  void ratio(double r) {
    lo = any ? std::min(lo, r) : r;
    hi = any ? std::max(hi, r) : r;
    any = true;
  }
  std::string line() const {
    std::string s = name + ',' + std::to_string(trials) + ',' + std::to_string(passed) + ',' + std::to_string(skipped);
    if (any) return s + ',' + io::fmt(lo) + ',' + io::fmt(hi);
    return s + ",skipped,skipped";
  }
};

LayerChain random_chain(const GroupPtr& g, Rng& rng, bool relu) {
  std::vector<Representation> reps;
  for (int i = 0; i < 4; ++i) reps.push_back(random_representation(g, rng, relu));
  std::vector<LinearLayerSpec> layers;
  std::vector<Activation> acts;
  for (int i = 0; i < 3; ++i) {
    layers.emplace_back(random_gaussian(reps[i + 1].dim(), reps[i].dim(), rng), reps[i], reps[i + 1]);
    if (i < 2) acts.push_back(relu ? Activation::relu() : Activation::scaling(rng.uniform(0.25, 2.0)));
  }
  return LayerChain(std::move(layers), std::move(acts));
}

inline constexpr double kDegenerateDistance = 1e-9;

int cmd_verify_bounds(const VerifyOptions& o) {
  const auto g = parse_group(o.group);
  SuiteTally sandwich{"sandwich"}, composition{"composition"}, network{"network"};
  for (std::size_t t = 0; t < o.trials; ++t) {
    const std::uint64_t seed = o.seed + t;
    Rng rng(seed);
    const auto layer = random_layer(g, rng);
    ++sandwich.trials;
    try {
      const auto rep = worst_case_defect(layer, NormKind::spectral());
      ++sandwich.passed;
      if (rep.projection_distance <= kDegenerateDistance * norm(layer.weight(), NormKind::frobenius())) ++sandwich.skipped;
      else sandwich.ratio(rep.worst_case / rep.projection_distance);
    } catch (const BoundViolation&) {
      sandwich.failing_seeds.push_back(seed);
    }
  }
  for (std::size_t t = 0; t < o.composition_trials; ++t) {
    const std::uint64_t seed = o.seed + 1000003 + t;
    Rng rng(seed);
    const auto chain = random_chain(g, rng, t % 2 == 1);
    const ChainSampling sampling{32, seed};
    const auto c = composition_bound_check(chain, NormKind::spectral(), sampling);
    const auto n = network_bound_constant(chain, NormKind::spectral(), sampling);
    ++composition.trials;
    ++network.trials;
    if (c.holds) ++composition.passed;
    else composition.failing_seeds.push_back(seed);
    if (n.holds) ++network.passed;
    else network.failing_seeds.push_back(seed);
    if (c.rhs > 0.0) composition.ratio(c.lhs / c.rhs);
    else ++composition.skipped;
    if (n.rhs > 0.0) network.ratio(n.lhs / n.rhs);
    else ++network.skipped;
  }
  std::cout << "suite,trials,passed,skipped,min_ratio,max_ratio\n";
  int status = kOk;
  for (const auto* s : {&sandwich, &composition, &network}) {
    std::cout << s->line() << '\n';
    for (auto seed : s->failing_seeds) {
      std::cerr << "violation: suite " << s->name << " seed " << seed << '\n';
      status = kViolation;
    }
  }
  return status;
}

// ---------------------------------------------------------------------------
// train / sweep

struct TrainOptions {
  std::string output_dir = ".";
  double lambda_g = 0.0, lambda_perp = 0.0, lr = 0.003;
  std::optional<double> sigma_perp;
  int epochs = 200, log_every = 20;
  std::uint64_t seed = 0;
  std::size_t hidden = 8, n_per_class = 350, grid = 200;
  std::string norm = "frobenius";
  bool hard_projection = false;
};

TrainConfig to_config(const TrainOptions& o) {
  TrainConfig c;
  c.lambda_g = o.lambda_g;
  c.lambda_perp = o.lambda_perp;
  c.norm_kind = NormKind::parse(o.norm);
  c.lr = o.lr;
  c.epochs = o.epochs;
  c.seed = o.seed;
  c.hidden = o.hidden;
  c.hard_projection = o.hard_projection;
  c.log_every = o.log_every;
  c.validate();
  return c;
}

ToyDataset make_dataset(const TrainOptions& o) {
  return o.sigma_perp ? gen_wavey_rings(o.n_per_class, *o.sigma_perp, o.seed) : gen_disk_annulus(o.n_per_class, o.seed);
}

void write_history(const fs::path& path, const std::vector<HistoryRow>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io::FormatError("cannot open '" + path.string() + "' for writing");
  io::write_history_csv(f, rows);
}

int cmd_train(const TrainOptions& o) {
  const TrainConfig cfg = to_config(o);
  const ToyDataset data = make_dataset(o);
  const TrainResult r = train_toy(data, cfg);
  const fs::path dir(o.output_dir);
  fs::create_directories(dir);
  write_history(dir / "history.csv", r.history);
  io::write_params((dir / "params.bin").string(), r.params);
  const auto grid = svg::sample_grid([&](const std::vector<Point>& pts) { return forward_batch(r.params, pts); },
                                     svg::Bounds{}, o.grid);
  std::ofstream plot(dir / "boundary.svg", std::ios::binary);
  if (!plot) throw io::FormatError("cannot write boundary.svg");
  plot << svg::render(data.points, data.labels, grid, {0.0});
  const auto& last = r.history.back();
  std::cout << "epoch,task_loss,train_accuracy,test_accuracy,empirical_defect\n"
            << last.epoch << ',' << csv_line({last.task_loss, r.train_accuracy, last.test_accuracy,
                                               last.empirical_defect})
            << '\n';
  return kOk;
}

struct SweepOptions {
  TrainOptions base;
  std::string lambda_g_grid = "0", lambda_perp_grid = "0", sigma_perp_grid, seeds = "0", preset;
  std::size_t threads = 0;
};

struct Cell {
  double lambda_g, lambda_perp;
  std::optional<double> sigma;
  std::uint64_t seed;
  std::string status = "pending", message;
  double train_accuracy = 0.0, test_accuracy = 0.0, defect = 0.0;

  auto key() const { return std::make_tuple(lambda_g, lambda_perp, sigma.value_or(-1.0), seed); }
  std::string dirname() const {
    return "lg" + io::fmt(lambda_g) + "_lp" + io::fmt(lambda_perp) + "_s" + (sigma ? io::fmt(*sigma) : "none") +
           "_seed" + std::to_string(seed);
  }
};

std::size_t pool_size(std::size_t flag) {
  if (const char* env = std::getenv("EQUIPROJ_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("EQUIPROJ_THREADS must be a positive integer, got '") + env + "'");
  }
  if (flag > 0) return flag;
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_sweep(SweepOptions o) {
  if (o.preset == "lambda-grid") {
    o.lambda_g_grid = o.lambda_perp_grid = "0,0.001,0.01,0.1";
  } else if (o.preset == "sigma-grid") {
    o.sigma_perp_grid = "0,0.5,0.75,1";
    o.lambda_perp_grid = "1";
  } else if (!o.preset.empty()) {
    throw UsageError("unknown preset '" + o.preset + "'");
  }
  const auto lg = parse_grid(o.lambda_g_grid, "lambda-g-grid");
  const auto lp = parse_grid(o.lambda_perp_grid, "lambda-perp-grid");
  const auto sg = parse_grid(o.sigma_perp_grid, "sigma-perp-grid");
  const auto sd = parse_grid(o.seeds, "seeds");
  if (lg.empty() || lp.empty() || sd.empty()) throw UsageError("sweep grids must be non-empty");
  std::vector<Cell> cells;
  for (double a : lg)
    for (double b : lp)
      for (double s : sd) {
        if (s < 0 || s != std::floor(s)) throw UsageError("seeds must be non-negative integers");
        if (sg.empty()) cells.push_back({a, b, std::nullopt, static_cast<std::uint64_t>(s)});
        for (double c : sg) cells.push_back({a, b, c, static_cast<std::uint64_t>(s)});
      }
  std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) { return x.key() < y.key(); });
  // Validate the shared settings once before spawning workers.
  to_config(o.base);
  const fs::path root(o.base.output_dir);
  fs::create_directories(root);

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& c = cells[i];
      TrainOptions t = o.base;
      t.lambda_g = c.lambda_g;
      t.lambda_perp = c.lambda_perp;
      t.sigma_perp = c.sigma;
      t.seed = c.seed;
      try {
        const ToyDataset data = make_dataset(t);
        const TrainResult r = train_toy(data, to_config(t));
        const fs::path dir = root / c.dirname();
        fs::create_directories(dir);
        write_history(dir / "history.csv", r.history);
        c.status = "ok";
        c.train_accuracy = r.train_accuracy;
        c.test_accuracy = r.history.back().test_accuracy;
        c.defect = r.history.back().empirical_defect;
      } catch (const TrainingDiverged& e) {
        c.status = "diverged";
        c.message = e.what();
      } catch (const std::exception& e) {
        c.status = "error";
        c.message = e.what();
      }
      if (c.status != "ok") {
        std::lock_guard lock(log_mutex);
        std::cerr << "cell " << c.dirname() << ": " << c.message << '\n';
      }
    }
  };
  const std::size_t n = std::min(pool_size(o.threads), cells.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::ofstream summary(root / "summary.csv", std::ios::binary);
  if (!summary) throw io::FormatError("cannot write summary.csv");
  summary << "lambda_g,lambda_perp,sigma_perp,seed,status,train_accuracy,test_accuracy,empirical_defect\n";
  std::size_t failed = 0;
  for (const auto& c : cells) {
    summary << io::fmt(c.lambda_g) << ',' << io::fmt(c.lambda_perp) << ',' << (c.sigma ? io::fmt(*c.sigma) : "")
            << ',' << c.seed << ',' << c.status << ',';
    if (c.status == "ok") summary << csv_line({c.train_accuracy, c.test_accuracy, c.defect});
    else summary << ",,";
    summary << '\n';
    failed += c.status == "ok" ? 0 : 1;
  }
  std::cout << "cells," << cells.size() << ",failed," << failed << '\n';
  if (failed == cells.size()) {
    const bool diverged = std::all_of(cells.begin(), cells.end(), [](const Cell& c) { return c.status == "diverged"; });
    return diverged ? kDiverged : kMath;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

void add_matrix_flags(CLI::App* c, MatrixOptions& o, bool with_method) {
  c->add_option("--input", o.input, "matrix file")->required();
  c->add_option("--output", o.output, with_method ? "projected matrix file" : "defect CSV (default stdout)");
  c->add_option("--group", o.group, "cyclic:n or dihedral:n");
  c->add_option("--rep-in", o.rep_in, "regular or trivial");
  c->add_option("--rep-out", o.rep_out, "regular or trivial");
  c->add_option("--norm", o.norm, "spectral, frobenius, inf or mixed:p,q");
  if (with_method) {
    c->add_option("--method", o.method, "finite, circulant or spectral");
    c->add_option("--check-method", o.check_method, "second method to compare against");
  }
}

void add_train_flags(CLI::App* c, TrainOptions& o) {
  c->add_option("--output-dir", o.output_dir);
  c->add_option("--lambda-g", o.lambda_g);
  c->add_option("--lambda-perp", o.lambda_perp);
  c->add_option("--lr", o.lr);
  c->add_option("--epochs", o.epochs);
  c->add_option("--log-every", o.log_every);
  c->add_option("--seed", o.seed);
  c->add_option("--hidden", o.hidden);
  c->add_option("--n-per-class", o.n_per_class);
  c->add_option("--grid", o.grid, "decision-boundary lattice size");
  c->add_option("--norm", o.norm);
  c->add_flag("--hard-projection", o.hard_projection, "mask w1, w2 after every step");
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty() && args[0].rfind("--", 0) != 0) {
    for (std::size_t i = 1; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
        args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
        args.erase(args.begin() + static_cast<long>(i));
      } else {
        continue;
      }
      const auto extra = config_args(path, args[0]);
      args.insert(args.begin() + 1, extra.begin(), extra.end());
      break;
    }
  }

  CLI::App app{"Equivariant projection toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  MatrixOptions proj, def;
  KernelOptions kern;
  VerifyOptions ver;
  TrainOptions train;
  SweepOptions sweep;
  std::string sigma_text;

  auto* p = app.add_subcommand("project", "project a serialised operator onto the equivariant subspace");
  add_matrix_flags(p, proj, true);
  auto* d = app.add_subcommand("defect", "per-element equivariance defect report");
  add_matrix_flags(d, def, false);
  auto* k = app.add_subcommand("kernel-project", "project a C4 steerable kernel");
  k->add_option("--input", kern.input)->required();
  k->add_option("--output", kern.output);
  k->add_option("--trials", kern.trials, "convolution defect trials (0 to skip)");
  k->add_option("--seed", kern.seed);
  auto* v = app.add_subcommand("verify-bounds", "randomised bound suites");
  v->add_option("--group", ver.group);
  v->add_option("--trials", ver.trials);
  v->add_option("--composition-trials", ver.composition_trials);
  v->add_option("--seed", ver.seed);
  auto* t = app.add_subcommand("train", "train the toy invariant classifier");
  add_train_flags(t, train);
  t->add_option("--sigma-perp", sigma_text, "use wavey rings with this amplitude");
  auto* s = app.add_subcommand("sweep", "train over a grid of penalties");
  add_train_flags(s, sweep.base);
  s->add_option("--lambda-g-grid", sweep.lambda_g_grid);
  s->add_option("--lambda-perp-grid", sweep.lambda_perp_grid);
  s->add_option("--sigma-perp-grid", sweep.sigma_perp_grid);
  s->add_option("--seeds", sweep.seeds);
  s->add_option("--preset", sweep.preset, "lambda-grid or sigma-grid");
  s->add_option("--threads", sweep.threads, "worker count (default: cores)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  if (p->parsed()) return cmd_project(proj);
  if (d->parsed()) return cmd_defect(def);
  if (k->parsed()) return cmd_kernel_project(kern);
  if (v->parsed()) return cmd_verify_bounds(ver);
  if (t->parsed()) {
    if (!sigma_text.empty()) train.sigma_perp = parse_grid(sigma_text, "sigma-perp").at(0);
    return cmd_train(train);
  }
  return cmd_sweep(sweep);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const io::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const BoundViolation& e) {
    std::cerr << "violation: " << e.what() << '\n';
    return kViolation;
  } catch (const TrainingDiverged& e) {
    std::cerr << "diverged: " << e.what() << " (last finite epoch " << e.last_finite_epoch() << ")\n";
    return kDiverged;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "math error: " << e.what() << '\n';
    return kMath;
  }
}
