#include "mixlab/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mixlab {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return is;
}

void write_header(std::ostream& os, const std::string& text, std::size_t width) {
  if (text.size() + 1 > width) throw IoError("header does not fit: " + text);
  std::string h = text;
  h.resize(width - 1, ' ');
  h.push_back('\n');
  os.write(h.data(), static_cast<std::streamsize>(h.size()));
}

std::istringstream read_header(std::istream& is, std::size_t width, std::string_view magic,
                               const std::filesystem::path& path) {
  std::string h(width, '\0');
  if (!is.read(h.data(), static_cast<std::streamsize>(width)) || h.back() != '\n')
    throw IoError(path.string() + ": truncated header");
  std::istringstream ss(h);
  std::string m;
  ss >> m;
  if (m != magic) throw IoError(path.string() + ": expected " + std::string(magic) + " file");
  return ss;
}

template <class T>
void write_values(std::ostream& os, const T* data, std::size_t n) {
  std::vector<T> buf(data, data + n);
  for (auto& v : buf) v = to_little(v);
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

template <class T>
std::vector<T> read_values(std::istream& is, std::size_t n, const std::filesystem::path& path) {
  std::vector<T> buf(n);
  if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * sizeof(T))))
    throw IoError(path.string() + ": truncated payload");
  for (auto& v : buf) v = to_little(v);
  if (is.peek() != std::char_traits<char>::eof()) throw IoError(path.string() + ": trailing bytes");
  return buf;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.close();
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_scalar_field(const std::filesystem::path& path, const ScalarField& f) {
  auto os = open_out(path);
  const int n = f.grid().n();
  write_header(os, "SF1 " + std::to_string(n) + " " + std::to_string(n), 16);
  write_values(os, f.values().data(), f.values().size());
  finish(os, path);
}

ScalarField read_scalar_field(const std::filesystem::path& path) {
  auto is = open_in(path);
  auto ss = read_header(is, 16, "SF1", path);
  int n1 = 0, n2 = 0;
  if (!(ss >> n1 >> n2) || n1 != n2) throw IoError(path.string() + ": bad SF1 dimensions");
  const Grid g(n1);
  return ScalarField(g, read_values<double>(is, g.size(), path));
}

void write_flow_map(const std::filesystem::path& path, const FlowMap& fm) {
  auto os = open_out(path);
  write_header(os,
               "FM1 " + std::to_string(fm.grid.n()) + " " + format_double(fm.time) + " " +
                   (fm.inverse ? "1" : "0"),
               64);
  std::vector<double> xy(2 * fm.positions.size());
  for (std::size_t k = 0; k < fm.positions.size(); ++k) {
    xy[2 * k] = fm.positions[k].x1();
    xy[2 * k + 1] = fm.positions[k].x2();
  }
  write_values(os, xy.data(), xy.size());
  finish(os, path);
}

FlowMap read_flow_map(const std::filesystem::path& path) {
  auto is = open_in(path);
  auto ss = read_header(is, 64, "FM1", path);
  int n = 0, inv = 0;
  double t = 0.0;
  if (!(ss >> n >> t >> inv)) throw IoError(path.string() + ": bad FM1 header");
  const Grid g(n);
  auto xy = read_values<double>(is, 2 * g.size(), path);
  FlowMap fm{g, t, inv != 0, {}};
  fm.positions.reserve(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) fm.positions.emplace_back(xy[2 * k], xy[2 * k + 1]);
  return fm;
}

void write_permutation(const std::filesystem::path& path, const CellPermutation& p) {
  auto os = open_out(path);
  write_header(os, "CP1 " + std::to_string(p.side()), 16);
  write_values(os, p.data().data(), p.size());
  finish(os, path);
}

CellPermutation read_permutation(const std::filesystem::path& path) {
  auto is = open_in(path);
  auto ss = read_header(is, 16, "CP1", path);
  int side = 0;
  if (!(ss >> side) || side < 1 || side > 65536) throw IoError(path.string() + ": bad CP1 header");
  const auto n = static_cast<std::size_t>(side) * side;
  return CellPermutation(side, read_values<std::uint32_t>(is, n, path));
}

void write_young_weights(const std::filesystem::path& path, const YoungHeader& h, const std::vector<double>& dense) {
  const auto expect = static_cast<std::size_t>(h.macro) * h.macro * h.micro * h.micro;
  if (dense.size() != expect) throw IoError("YM1 payload size mismatch");
  auto os = open_out(path);
  write_header(os,
               "YM1 " + std::to_string(h.macro) + " " + std::to_string(h.micro) + " " + format_double(h.t_lo) + " " +
                   format_double(h.t_hi) + " " + std::to_string(h.count),
               64);
  write_values(os, dense.data(), dense.size());
  finish(os, path);
}

void write_pgm(const std::filesystem::path& path, const ScalarField& f, double lo, double hi) {
  if (lo == hi) {
    lo = f.min();
    hi = f.max();
  }
  const double span = hi > lo ? hi - lo : 1.0;
  auto os = open_out(path);
  const int n = f.grid().n();
  os << "P5\n# value = " << format_double(lo) << " + pixel / 255 * " << format_double(span) << "\n"
     << n << " " << n << "\n255\n";
  std::vector<unsigned char> px(f.grid().size());
  // image rows run top to bottom, x2 runs upward
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double q = (f.at(i, n - 1 - j) - lo) / span;
      const double c = std::clamp(q, 0.0, 1.0);
      px[static_cast<std::size_t>(j) * n + i] = static_cast<unsigned char>(std::lround(255.0 * c));
    }
  os.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  finish(os, path);
}

void write_series_csv(const std::filesystem::path& path, const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size()) throw IoError("series length mismatch for " + path.string());
  auto os = open_out(path);
  os << "t,value\n";
  for (std::size_t k = 0; k < t.size(); ++k) os << format_double(t[k]) << ',' << format_double(v[k]) << '\n';
  finish(os, path);
}

void write_matrix_csv(const std::filesystem::path& path, const std::string& corner,
                      const std::vector<std::string>& columns, const std::vector<std::string>& rows,
                      const std::vector<std::vector<double>>& values) {
  if (values.size() != rows.size()) throw IoError("matrix row count mismatch for " + path.string());
  auto os = open_out(path);
  os << corner;
  for (const auto& c : columns) os << ',' << c;
  os << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (values[r].size() != columns.size()) throw IoError("matrix column count mismatch for " + path.string());
    os << rows[r];
    for (double v : values[r]) os << ',' << format_double(v);
    os << '\n';
  }
  finish(os, path);
}

}  // namespace mixlab
