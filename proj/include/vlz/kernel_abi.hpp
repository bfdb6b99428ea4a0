#pragma once

// Raw-pointer interface shared by every kernel backend. ISA-specific translation
// units include only this header so no inline template code compiled with wider
// instruction sets can leak into generic code.

#include <cstddef>
#include <cstdint>

namespace vlz {

/// Block tile layout. The tile holds (edge + 1)^ndims int32 values; index 0 along each
/// dimension is the low-index halo, in-block coordinate c lives at c + 1. Codes are
/// written to an edge^ndims row-major uint16 buffer. `extents` are the in-bounds
/// extents of the block (first `ndims` entries used).
struct TileGeometry {
  int ndims;
  int edge;
  int extents[3];
};

struct OpCounters {
  std::uint64_t float_arith = 0;    // add/sub/mul/div on floating-point values
  std::uint64_t float_round = 0;
  std::uint64_t float_cast = 0;     // floating-point to integer conversion
  std::uint64_t float_compare = 0;
  std::uint64_t int_lorenzo = 0;    // integer add/sub of the Lorenzo stencil
  std::uint64_t int_postquant = 0;  // integer delta, range check, code offset

  friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

/// Pre-quantizes n values: out[i] = round_half_away(double(in[i]) / two_eb).
/// Returns the index of the first value failing the overflow guard, or n.
using PrequantFn = std::size_t (*)(const float* in, std::int32_t* out, std::size_t n, double two_eb);

/// Computes Lorenzo prediction and post-quantization for all in-bounds rows of a tile.
using PostquantFn = void (*)(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                             std::uint16_t* codes);

inline constexpr double kPrequantLimit = 2147483647.0;

}  // namespace vlz
