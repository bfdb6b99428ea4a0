// Scalar reference kernels. Every lane kernel must reproduce these outputs exactly.

#include <cmath>

#include "kernels/backends.hpp"
#include "vlz/dualquant.hpp"

namespace vlz::kernels {
namespace {

template <bool Count>
std::size_t prequantize_impl(const float* in, std::int32_t* out, std::size_t n, double two_eb, OpCounters* ops) {
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(in[i]) / two_eb;
    if constexpr (Count) {
      ops->float_arith += 1;
      ops->float_compare += 2;
    }
    if (!(x > -kPrequantLimit && x < kPrequantLimit)) return i;
    const double r = std::round(x);
    out[i] = static_cast<std::int32_t>(r);
    if constexpr (Count) {
      ops->float_round += 1;
      ops->float_cast += 1;
    }
  }
  return n;
}

constexpr std::uint64_t lorenzo_terms(int ndims) { return ndims == 1 ? 0 : ndims == 2 ? 2 : 6; }

template <bool Count>
void postquantize_impl(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius, std::uint16_t* codes,
                       OpCounters* ops) {
  const int b = geom.edge;
  const int e0 = geom.extents[0];
  const int e1 = geom.ndims >= 2 ? geom.extents[1] : 1;
  const int e2 = geom.ndims >= 3 ? geom.extents[2] : 1;
  for (int i = 0; i < e0; ++i) {
    for (int j = 0; j < e1; ++j) {
      for (int k = 0; k < e2; ++k) {
        std::array<int, 3> c{i, j, k};
        std::size_t out = 0;
        std::size_t at = 0;
        const std::size_t t = static_cast<std::size_t>(b) + 1;
        switch (geom.ndims) {
          case 1:
            out = static_cast<std::size_t>(i);
            at = out + 1;
            break;
          case 2:
            out = static_cast<std::size_t>(i) * b + j;
            at = (static_cast<std::size_t>(i) + 1) * t + j + 1;
            break;
          default:
            out = (static_cast<std::size_t>(i) * b + j) * b + k;
            at = ((static_cast<std::size_t>(i) + 1) * t + j + 1) * t + k + 1;
            break;
        }
        const std::int32_t pred = lorenzo_predict(tile, geom, c);
        codes[out] = quantize_delta(tile[at], pred, radius);
        if constexpr (Count) {
          ops->int_lorenzo += lorenzo_terms(geom.ndims);
          ops->int_postquant += 3;
        }
      }
    }
  }
}

}  // namespace

std::size_t prequantize_scalar(const float* in, std::int32_t* out, std::size_t n, double two_eb) {
  return prequantize_impl<false>(in, out, n, two_eb, nullptr);
}

void postquantize_scalar(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                         std::uint16_t* codes) {
  postquantize_impl<false>(tile, geom, radius, codes, nullptr);
}

std::size_t prequantize_scalar_counted(const float* in, std::int32_t* out, std::size_t n, double two_eb,
                                       OpCounters& counters) {
  return prequantize_impl<true>(in, out, n, two_eb, &counters);
}

void postquantize_scalar_counted(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                                 std::uint16_t* codes, OpCounters& counters) {
  postquantize_impl<true>(tile, geom, radius, codes, &counters);
}

}  // namespace vlz::kernels
