#pragma once

/// @file io.hpp
/// @brief Binary snapshot formats, PGM previews and CSV tables.
///
/// All binary payloads are little-endian. Headers are ASCII, space padded and
/// newline terminated so `head -c` shows them:
///   SF1  16 bytes  "SF1 <n> <n>"                scalar field, n*n float64
///   FM1  64 bytes  "FM1 <n> <t> <inverse>"      flow map, 2*n*n float64 (x1, x2 interleaved)
///   CP1  16 bytes  "CP1 <side>"                 permutation, side*side uint32
///   YM1  64 bytes  "YM1 <M> <m> <t_lo> <t_hi> <count>"   M*M*m*m float64

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixlab/torus.hpp"
#include "mixlab/transport.hpp"

namespace mixlab {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_scalar_field(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_scalar_field(const std::filesystem::path& path);

void write_flow_map(const std::filesystem::path& path, const FlowMap& fm);
FlowMap read_flow_map(const std::filesystem::path& path);

void write_permutation(const std::filesystem::path& path, const CellPermutation& p);
CellPermutation read_permutation(const std::filesystem::path& path);

struct YoungHeader {
  int macro = 0;
  int micro = 0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int count = 0;
};
void write_young_weights(const std::filesystem::path& path, const YoungHeader& h, const std::vector<double>& dense);

/// 8-bit binary PGM; values are mapped affinely from [lo, hi] (the field range
/// when lo == hi) and the mapping is recorded in a comment line.
void write_pgm(const std::filesystem::path& path, const ScalarField& f, double lo = 0.0, double hi = 0.0);

/// "t,value" table.
void write_series_csv(const std::filesystem::path& path, const std::vector<double>& t, const std::vector<double>& v);

/// Matrix with a header row; the first column holds the row labels.
void write_matrix_csv(const std::filesystem::path& path, const std::string& corner,
                      const std::vector<std::string>& columns, const std::vector<std::string>& rows,
                      const std::vector<std::vector<double>>& values);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double x);

}  // namespace mixlab
