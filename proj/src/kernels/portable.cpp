// ISA-independent lane kernels: fixed-width lane loops the compiler can map onto
// whatever vector unit the target has. Used where no native backend exists.

#include <array>
#include <cmath>

#include "kernels/backends.hpp"

namespace vlz::kernels {
namespace {

template <int L>
std::size_t prequantize_lanes(const float* in, std::int32_t* out, std::size_t n, double two_eb) {
  const auto lane = [two_eb](const float* src, std::int32_t* dst) {
    std::array<double, L> x;
    bool ok = true;
    for (int l = 0; l < L; ++l) {
      x[l] = static_cast<double>(src[l]) / two_eb;
      ok &= (x[l] > -kPrequantLimit) & (x[l] < kPrequantLimit);
    }
    if (!ok) return false;
    for (int l = 0; l < L; ++l) {
      const double t = std::trunc(x[l]);
      const double away = std::copysign(1.0, x[l]);
      dst[l] = static_cast<std::int32_t>(std::fabs(x[l] - t) >= 0.5 ? t + away : t);
    }
    return true;
  };
  std::size_t i = 0;
  for (; i + L <= n; i += L) {
    if (!lane(in + i, out + i)) return i + prequantize_scalar(in + i, out + i, L, two_eb);
  }
  if (i < n) {
    std::array<float, L> lane_in{};
    std::array<std::int32_t, L> lane_out{};
    const std::size_t rest = n - i;
    for (std::size_t l = 0; l < rest; ++l) lane_in[l] = in[i + l];
    if (!lane(lane_in.data(), lane_out.data())) return i + prequantize_scalar(in + i, out + i, rest, two_eb);
    for (std::size_t l = 0; l < rest; ++l) out[i + l] = lane_out[l];
  }
  return n;
}

template <int L>
void quantize_lane(const std::uint32_t* d, const std::uint32_t* p, std::uint32_t span, std::uint32_t radius,
                   std::uint16_t* dst) {
  for (int l = 0; l < L; ++l) {
    const std::uint32_t delta = d[l] - p[l];
    dst[l] = (delta + span) <= 2 * span ? static_cast<std::uint16_t>(delta + radius) : 0;
  }
}

template <int L>
void postquantize_lanes(const std::int32_t* tile_signed, const TileGeometry& geom, std::int32_t radius,
                        std::uint16_t* codes) {
  // Unsigned view: Lorenzo sums wrap modulo 2^32.
  const auto* tile = reinterpret_cast<const std::uint32_t*>(tile_signed);
  const auto span = static_cast<std::uint32_t>(radius - 1);
  const auto r = static_cast<std::uint32_t>(radius);
  const int b = geom.edge;
  const long t = b + 1;
  std::array<std::uint32_t, L> p;
  if (geom.ndims == 1) {
    const std::uint32_t* cur = tile + 1;
    for (int k = 0; k < geom.extents[0]; k += L) quantize_lane<L>(cur + k, cur + k - 1, span, r, codes + k);
  } else if (geom.ndims == 2) {
    for (int i = 0; i < geom.extents[0]; ++i) {
      const std::uint32_t* cur = tile + (i + 1) * t + 1;
      const std::uint32_t* up = cur - t;
      std::uint16_t* dst = codes + static_cast<long>(i) * b;
      for (int k = 0; k < geom.extents[1]; k += L) {
        for (int l = 0; l < L; ++l) p[l] = cur[k + l - 1] + (up[k + l] - up[k + l - 1]);
        quantize_lane<L>(cur + k, p.data(), span, r, dst + k);
      }
    }
  } else {
    const long plane = t * t;
    for (int i = 0; i < geom.extents[0]; ++i) {
      for (int j = 0; j < geom.extents[1]; ++j) {
        const std::uint32_t* cur = tile + ((i + 1) * t + j + 1) * t + 1;
        const std::uint32_t* north = cur - t;
        const std::uint32_t* below = cur - plane;
        const std::uint32_t* below_north = below - t;
        std::uint16_t* dst = codes + (static_cast<long>(i) * b + j) * b;
        for (int k = 0; k < geom.extents[2]; k += L) {
          for (int l = 0; l < L; ++l) {
            const int x = k + l;
            const std::uint32_t faces = cur[x - 1] + north[x] + below[x];
            const std::uint32_t edges = north[x - 1] + below[x - 1] + below_north[x];
            p[l] = faces - edges + below_north[x - 1];
          }
          quantize_lane<L>(cur + k, p.data(), span, r, dst + k);
        }
      }
    }
  }
}

}  // namespace

std::size_t prequantize_portable4(const float* in, std::int32_t* out, std::size_t n, double two_eb) {
  return prequantize_lanes<4>(in, out, n, two_eb);
}
std::size_t prequantize_portable8(const float* in, std::int32_t* out, std::size_t n, double two_eb) {
  return prequantize_lanes<8>(in, out, n, two_eb);
}
std::size_t prequantize_portable16(const float* in, std::int32_t* out, std::size_t n, double two_eb) {
  return prequantize_lanes<16>(in, out, n, two_eb);
}
void postquantize_portable4(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                            std::uint16_t* codes) {
  postquantize_lanes<4>(tile, geom, radius, codes);
}
void postquantize_portable8(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                            std::uint16_t* codes) {
  postquantize_lanes<8>(tile, geom, radius, codes);
}
void postquantize_portable16(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                             std::uint16_t* codes) {
  postquantize_lanes<16>(tile, geom, radius, codes);
}

}  // namespace vlz::kernels
