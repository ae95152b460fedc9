#include "mixlab/hilbert.hpp"

namespace mixlab {

namespace {
void rotate(std::uint64_t s, std::uint64_t& x, std::uint64_t& y, std::uint64_t rx, std::uint64_t ry) {
  if (ry == 0) {
    if (rx == 1) {
      x = s - 1 - x;
      y = s - 1 - y;
    }
    std::swap(x, y);
  }
}
}  // namespace

std::uint64_t hilbert_index(int order, std::uint32_t xi, std::uint32_t yi) {
  const std::uint64_t n = std::uint64_t{1} << order;
  std::uint64_t x = xi, y = yi, d = 0;
  for (std::uint64_t s = n / 2; s > 0; s /= 2) {
    const std::uint64_t rx = (x & s) > 0 ? 1 : 0;
    const std::uint64_t ry = (y & s) > 0 ? 1 : 0;
    d += s * s * ((3 * rx) ^ ry);
    rotate(n, x, y, rx, ry);
  }
  return d;
}

std::pair<std::uint32_t, std::uint32_t> hilbert_cell(int order, std::uint64_t d) {
  const std::uint64_t n = std::uint64_t{1} << order;
  std::uint64_t x = 0, y = 0, t = d;
  for (std::uint64_t s = 1; s < n; s *= 2) {
    const std::uint64_t rx = 1 & (t / 2);
    const std::uint64_t ry = 1 & (t ^ rx);
    rotate(s, x, y, rx, ry);
    x += s * rx;
    y += s * ry;
    t /= 4;
  }
  return {static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)};
}

}  // namespace mixlab
