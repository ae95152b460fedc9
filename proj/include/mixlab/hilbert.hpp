#pragma once

#include <cstdint>
#include <utility>

namespace mixlab {

/// Position of lattice cell (x, y) along the Hilbert curve filling a
/// 2^order x 2^order square. Every dyadic sub-square is a contiguous key range.
std::uint64_t hilbert_index(int order, std::uint32_t x, std::uint32_t y);

/// Inverse of hilbert_index.
std::pair<std::uint32_t, std::uint32_t> hilbert_cell(int order, std::uint64_t d);

}  // namespace mixlab
