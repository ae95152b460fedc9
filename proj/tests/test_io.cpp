#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "mixlab/io.hpp"

using namespace mixlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mixlab-io-tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string head(const fs::path& p, std::size_t n) {
  std::ifstream is(p, std::ios::binary);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  return s;
}

}  // namespace

TEST_CASE("SF1 round trip is exact") {
  const Grid g(16);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<double> v(g.size());
  for (auto& x : v) x = z(rng);
  const ScalarField f(g, v);
  const auto p = scratch("a.sf1");
  write_scalar_field(p, f);
  CHECK(fs::file_size(p) == 16 + 8 * g.size());
  CHECK(head(p, 16).substr(0, 9) == "SF1 16 16");
  CHECK(head(p, 16).back() == '\n');
  const auto back = read_scalar_field(p);
  CHECK(back.grid() == g);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(back[k] == f[k]);
}

TEST_CASE("SF1 reader rejects damaged files") {
  const auto p = scratch("b.sf1");
  write_scalar_field(p, ScalarField(Grid(8), 1.0));
  {
    std::ofstream os(p, std::ios::binary | std::ios::app);
    os << 'x';
  }
  CHECK_THROWS_AS(read_scalar_field(p), IoError);
  fs::resize_file(p, 100);
  CHECK_THROWS_AS(read_scalar_field(p), IoError);
  CHECK_THROWS_AS(read_scalar_field(scratch("missing.sf1")), IoError);
  {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    os << "XX1 8 8         \n";
  }
  CHECK_THROWS_AS(read_scalar_field(p), IoError);
}

TEST_CASE("FM1 and CP1 round trips") {
  const Grid g(8);
  FlowMap m = identity_map(g);
  m.time = 2.5;
  m.inverse = true;
  m.positions[3] = TorusPoint(0.123456789012345, 0.9);
  const auto p = scratch("m.fm1");
  write_flow_map(p, m);
  const auto back = read_flow_map(p);
  CHECK(back.time == 2.5);
  CHECK(back.inverse);
  CHECK(back.positions == m.positions);

  const auto perm = CellPermutation::translation(4, 1, 3);
  const auto q = scratch("p.cp1");
  write_permutation(q, perm);
  CHECK(fs::file_size(q) == 16 + 4 * 16);
  CHECK(read_permutation(q) == perm);
}

TEST_CASE("PGM preview maps the value range onto bytes") {
  const Grid g(8);
  const auto f = ScalarField::from_function(g, [](TorusPoint x) { return x.x1(); });
  const auto p = scratch("f.pgm");
  write_pgm(p, f, 0.0, 1.0);
  std::ifstream is(p, std::ios::binary);
  std::string magic;
  is >> magic;
  CHECK(magic == "P5");
  std::string rest((std::istreambuf_iterator<char>(is)), {});
  CHECK(rest.find("# value") != std::string::npos);
  CHECK(rest.size() > 64);
}

TEST_CASE("CSV output uses shortest round-trip numbers") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  const auto p = scratch("s.csv");
  write_series_csv(p, {0.0, 0.5}, {1.0, 0.25});
  std::ifstream is(p);
  std::string all((std::istreambuf_iterator<char>(is)), {});
  CHECK(all == "t,value\n0,1\n0.5,0.25\n");
  CHECK_THROWS_AS(write_series_csv(p, {0.0}, {1.0, 2.0}), IoError);
}

TEST_CASE("YM1 header layout") {
  const auto p = scratch("y.ym1");
  write_young_weights(p, {2, 2, 1.0, 2.0, 4}, std::vector<double>(16, 0.25));
  CHECK(fs::file_size(p) == 64 + 16 * 8);
  CHECK(head(p, 4) == "YM1 ");
  CHECK_THROWS(write_young_weights(p, {2, 2, 1.0, 2.0, 4}, std::vector<double>(3, 0.25)));
}
