#ifndef EQUIPROJ_IO_HPP
#define EQUIPROJ_IO_HPP

// Binary matrix / kernel / parameter files and CSV emission.
//
// Matrix:  int64 rows, int64 cols, rows*cols (re, im) float64 pairs.
// Kernel:  6 x int64 shape [c_out, c_in, 4, 4, s, s], then float64 values.
// Params:  "EQPM", uint64 version, int64 max_degree, channels, hidden,
//          float64 radial_width, int64 count, count float64 (flat layout).
// All multi-byte values little-endian regardless of host.

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "equiproj/defect.hpp"
#include "equiproj/errors.hpp"
#include "equiproj/linalg.hpp"
#include "equiproj/reynolds.hpp"
#include "equiproj/toy.hpp"

namespace equiproj::io {

/// Malformed or unreadable input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b.data(), 8);
}

inline std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw FormatError("unexpected end of file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

inline void put_i64(std::ostream& os, std::int64_t v) { put_u64(os, static_cast<std::uint64_t>(v)); }
inline std::int64_t get_i64(std::istream& is) { return static_cast<std::int64_t>(get_u64(is)); }
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

inline std::size_t get_extent(std::istream& is, const char* what, std::int64_t limit = std::int64_t{1} << 31) {
  const std::int64_t v = get_i64(is);
  if (v <= 0 || v > limit) throw FormatError(std::string("invalid ") + what + " in header: " + std::to_string(v));
  return static_cast<std::size_t>(v);
}

inline void expect_eof(std::istream& is) {
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload");
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrices

inline void write_matrix(std::ostream& os, const ComplexMatrix& m) {
  detail::put_i64(os, static_cast<std::int64_t>(m.rows()));
  detail::put_i64(os, static_cast<std::int64_t>(m.cols()));
  for (const auto& z : m.data()) {
    detail::put_f64(os, z.real());
    detail::put_f64(os, z.imag());
  }
}

inline ComplexMatrix read_matrix(std::istream& is) {
  const std::size_t r = detail::get_extent(is, "row count");
  const std::size_t c = detail::get_extent(is, "column count");
  if (r * c > (std::size_t{1} << 28)) throw FormatError("matrix too large");
  ComplexMatrix m(r, c);
  for (auto& z : m.data()) {
    const double re = detail::get_f64(is);
    z = Complex(re, detail::get_f64(is));
  }
  detail::expect_eof(is);
  return m;
}

inline void write_matrix(const std::string& path, const ComplexMatrix& m) {
  auto out = detail::open_out(path);
  write_matrix(out, m);
  if (!out) throw FormatError("write to '" + path + "' failed");
}

inline ComplexMatrix read_matrix(const std::string& path) {
  auto in = detail::open_in(path);
  return read_matrix(in);
}

// ---------------------------------------------------------------------------
// Kernels

inline void write_kernel(std::ostream& os, const SteerableKernel& k) {
  for (auto e : k.shape()) detail::put_i64(os, static_cast<std::int64_t>(e));
  for (double v : k.values()) detail::put_f64(os, v);
}

inline SteerableKernel read_kernel(std::istream& is) {
  std::array<std::size_t, 6> s{};
  for (auto& e : s) e = detail::get_extent(is, "kernel extent", 1 << 16);
  if (s[2] != 4 || s[3] != 4) throw FormatError("kernel orientation axes must have extent 4");
  if (s[4] != s[5]) throw FormatError("kernel spatial axes must be square");
  const std::size_t n = s[0] * s[1] * 16 * s[4] * s[5];
  if (n > (std::size_t{1} << 28)) throw FormatError("kernel too large");
  std::vector<double> v(n);
  for (auto& x : v) x = detail::get_f64(is);
  detail::expect_eof(is);
  return SteerableKernel(s[0], s[1], s[4], std::move(v));
}

inline void write_kernel(const std::string& path, const SteerableKernel& k) {
  auto out = detail::open_out(path);
  write_kernel(out, k);
  if (!out) throw FormatError("write to '" + path + "' failed");
}

inline SteerableKernel read_kernel(const std::string& path) {
  auto in = detail::open_in(path);
  return read_kernel(in);
}

// ---------------------------------------------------------------------------
// Toy model parameters

inline constexpr std::uint64_t kParamsVersion = 1;

inline void write_params(std::ostream& os, const ToyModelParams& p) {
  os.write("EQPM", 4);
  detail::put_u64(os, kParamsVersion);
  detail::put_i64(os, p.arch.max_degree);
  detail::put_i64(os, static_cast<std::int64_t>(p.arch.channels));
  detail::put_i64(os, static_cast<std::int64_t>(p.arch.hidden));
  detail::put_f64(os, p.arch.radial_width);
  const auto flat = p.to_flat();
  detail::put_i64(os, static_cast<std::int64_t>(flat.size()));
  for (double v : flat) detail::put_f64(os, v);
}

inline ToyModelParams read_params(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "EQPM", 4) != 0) throw FormatError("not a parameter file");
  const std::uint64_t version = detail::get_u64(is);
  if (version != kParamsVersion) throw FormatError("unsupported parameter file version " + std::to_string(version));
  ToyArchitecture a;
  const std::int64_t m = detail::get_i64(is);
  if (m < 0 || m > 64) throw FormatError("invalid max_degree");
  a.max_degree = static_cast<int>(m);
  a.channels = detail::get_extent(is, "channel count", 4096);
  a.hidden = detail::get_extent(is, "hidden width", 4096);
  a.radial_width = detail::get_f64(is);
  if (!(a.radial_width > 0.0)) throw FormatError("invalid radial width");
  ToyModelParams p(a);
  const std::size_t n = detail::get_extent(is, "parameter count", std::int64_t{1} << 28);
  if (n != p.flat_size()) throw FormatError("parameter count does not match architecture");
  std::vector<double> flat(n);
  for (auto& v : flat) v = detail::get_f64(is);
  detail::expect_eof(is);
  p.from_flat(flat);
  return p;
}

inline void write_params(const std::string& path, const ToyModelParams& p) {
  auto out = detail::open_out(path);
  write_params(out, p);
  if (!out) throw FormatError("write to '" + path + "' failed");
}

inline ToyModelParams read_params(const std::string& path) {
  auto in = detail::open_in(path);
  return read_params(in);
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest round-trip decimal form, independent of the C locale.
inline std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw FormatError("invalid number '" + s + "'");
  return v;
}

/// RFC-4180 quoting for fields containing separators or quotes.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw FormatError("unterminated quoted CSV field");
  out.push_back(cur);
  return out;
}

inline void write_history_csv(std::ostream& os, const std::vector<HistoryRow>& rows) {
  os << "epoch,task_loss,penalty_g,penalty_perp,test_accuracy,empirical_defect\n";
  for (const auto& r : rows)
    os << r.epoch << ',' << fmt(r.task_loss) << ',' << fmt(r.penalty_g) << ',' << fmt(r.penalty_perp) << ','
       << fmt(r.test_accuracy) << ',' << fmt(r.empirical_defect) << '\n';
}

inline std::vector<HistoryRow> read_history_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || split_csv_line(line).size() != 6) throw FormatError("missing history header");
  std::vector<HistoryRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw FormatError("history row has " + std::to_string(f.size()) + " fields");
    HistoryRow r;
    r.epoch = static_cast<int>(parse_double(f[0]));
    r.task_loss = parse_double(f[1]);
    r.penalty_g = parse_double(f[2]);
    r.penalty_perp = parse_double(f[3]);
    r.test_accuracy = parse_double(f[4]);
    r.empirical_defect = parse_double(f[5]);
    rows.push_back(r);
  }
  return rows;
}

/// Summary section (norm kind, worst case, projection distance) followed by
/// one row per group element.
inline void write_defect_csv(std::ostream& os, const DefectReport& r) {
  os << "norm_kind,worst_case,projection_distance\n";
  os << csv_field(r.norm_kind.to_string()) << ',' << fmt(r.worst_case) << ',' << fmt(r.projection_distance) << '\n';
  os << "element_index,defect\n";
  for (const auto& [g, d] : r.per_element) os << g << ',' << fmt(d) << '\n';
}

inline DefectReport read_defect_csv(std::istream& is) {
  std::string line;
  DefectReport r;
  if (!std::getline(is, line) || split_csv_line(line).size() != 3) throw FormatError("missing defect summary header");
  if (!std::getline(is, line)) throw FormatError("missing defect summary row");
  auto f = split_csv_line(line);
  if (f.size() != 3) throw FormatError("malformed defect summary row");
  try {
    r.norm_kind = NormKind::parse(f[0]);
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  r.worst_case = parse_double(f[1]);
  r.projection_distance = parse_double(f[2]);
  if (!std::getline(is, line) || split_csv_line(line).size() != 2) throw FormatError("missing element header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    f = split_csv_line(line);
    if (f.size() != 2) throw FormatError("malformed element row");
    r.per_element.emplace_back(static_cast<Element>(parse_double(f[0])), parse_double(f[1]));
  }
  return r;
}

}  // namespace equiproj::io

#endif  // EQUIPROJ_IO_HPP
