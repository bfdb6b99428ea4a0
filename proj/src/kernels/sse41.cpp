// 4-lane (128-bit) kernels.

#include <smmintrin.h>

#include "kernels/backends.hpp"

namespace vlz::kernels {
namespace {

constexpr int kLanes = 4;

inline __m128i prequant_lane(const float* in, const __m128d two_eb, bool& ok) {
  const __m128d neg_limit = _mm_set1_pd(-kPrequantLimit);
  const __m128d limit = _mm_set1_pd(kPrequantLimit);
  const __m128d half = _mm_set1_pd(0.5);
  const __m128d one = _mm_set1_pd(1.0);
  const __m128d sign_bit = _mm_set1_pd(-0.0);

  const __m128 f = _mm_loadu_ps(in);
  __m128i parts[2];
  int mask = 0;
  for (int h = 0; h < 2; ++h) {
    const __m128d wide = _mm_cvtps_pd(h == 0 ? f : _mm_movehl_ps(f, f));
    const __m128d x = _mm_div_pd(wide, two_eb);
    mask |= _mm_movemask_pd(_mm_and_pd(_mm_cmpgt_pd(x, neg_limit), _mm_cmplt_pd(x, limit))) << (2 * h);
    const __m128d t = _mm_round_pd(x, _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
    const __m128d frac = _mm_andnot_pd(sign_bit, _mm_sub_pd(x, t));
    const __m128d away = _mm_or_pd(_mm_and_pd(x, sign_bit), one);
    const __m128d r = _mm_add_pd(t, _mm_and_pd(_mm_cmpge_pd(frac, half), away));
    parts[h] = _mm_cvttpd_epi32(r);
  }
  ok = mask == 0xF;
  return _mm_unpacklo_epi64(parts[0], parts[1]);
}

}  // namespace

std::size_t prequantize_sse41(const float* in, std::int32_t* out, std::size_t n, double two_eb_value) {
  const __m128d two_eb = _mm_set1_pd(two_eb_value);
  std::size_t i = 0;
  bool ok = true;
  for (; i + kLanes <= n; i += kLanes) {
    const __m128i q = prequant_lane(in + i, two_eb, ok);
    if (!ok) return i + prequantize_scalar(in + i, out + i, kLanes, two_eb_value);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out + i), q);
  }
  if (i < n) {
    alignas(16) float lane_in[kLanes] = {0.f, 0.f, 0.f, 0.f};
    alignas(16) std::int32_t lane_out[kLanes];
    const std::size_t rest = n - i;
    for (std::size_t l = 0; l < rest; ++l) lane_in[l] = in[i + l];
    const __m128i q = prequant_lane(lane_in, two_eb, ok);
    if (!ok) return i + prequantize_scalar(in + i, out + i, rest, two_eb_value);
    _mm_store_si128(reinterpret_cast<__m128i*>(lane_out), q);
    for (std::size_t l = 0; l < rest; ++l) out[i + l] = lane_out[l];
  }
  return n;
}

void postquantize_sse41(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                        std::uint16_t* codes) {
  const __m128i span = _mm_set1_epi32(radius - 1);
  const __m128i span2 = _mm_set1_epi32(2 * (radius - 1));
  const __m128i vradius = _mm_set1_epi32(radius);
  const auto quantize = [&](const __m128i d, const __m128i p, std::uint16_t* dst) {
    const __m128i delta = _mm_sub_epi32(d, p);
    const __m128i shifted = _mm_add_epi32(delta, span);
    const __m128i in_range = _mm_cmpeq_epi32(_mm_min_epu32(shifted, span2), shifted);
    const __m128i code = _mm_and_si128(in_range, _mm_add_epi32(delta, vradius));
    _mm_storel_epi64(reinterpret_cast<__m128i*>(dst), _mm_packus_epi32(code, code));
  };
  const auto load = [](const std::int32_t* p) { return _mm_loadu_si128(reinterpret_cast<const __m128i*>(p)); };

  const int b = geom.edge;
  const long t = b + 1;
  if (geom.ndims == 1) {
    const std::int32_t* cur = tile + 1;
    for (int k = 0; k < geom.extents[0]; k += kLanes) quantize(load(cur + k), load(cur + k - 1), codes + k);
  } else if (geom.ndims == 2) {
    for (int i = 0; i < geom.extents[0]; ++i) {
      const std::int32_t* cur = tile + (i + 1) * t + 1;
      const std::int32_t* up = cur - t;
      std::uint16_t* dst = codes + static_cast<long>(i) * b;
      for (int k = 0; k < geom.extents[1]; k += kLanes) {
        const __m128i p = _mm_add_epi32(load(cur + k - 1), _mm_sub_epi32(load(up + k), load(up + k - 1)));
        quantize(load(cur + k), p, dst + k);
      }
    }
  } else {
    const long plane = t * t;
    for (int i = 0; i < geom.extents[0]; ++i) {
      for (int j = 0; j < geom.extents[1]; ++j) {
        const std::int32_t* cur = tile + ((i + 1) * t + j + 1) * t + 1;
        const std::int32_t* north = cur - t;
        const std::int32_t* below = cur - plane;
        const std::int32_t* below_north = below - t;
        std::uint16_t* dst = codes + (static_cast<long>(i) * b + j) * b;
        for (int k = 0; k < geom.extents[2]; k += kLanes) {
          const __m128i faces = _mm_add_epi32(_mm_add_epi32(load(cur + k - 1), load(north + k)), load(below + k));
          const __m128i edges =
              _mm_add_epi32(_mm_add_epi32(load(north + k - 1), load(below + k - 1)), load(below_north + k));
          const __m128i p = _mm_add_epi32(_mm_sub_epi32(faces, edges), load(below_north + k - 1));
          quantize(load(cur + k), p, dst + k);
        }
      }
    }
  }
}

}  // namespace vlz::kernels
