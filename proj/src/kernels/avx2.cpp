// 8-lane (256-bit) kernels.

#include <immintrin.h>

#include "kernels/backends.hpp"

namespace vlz::kernels {
namespace {

constexpr int kLanes = 8;

inline __m128i prequant_half(const __m128 f, const __m256d two_eb, int& mask) {
  const __m256d neg_limit = _mm256_set1_pd(-kPrequantLimit);
  const __m256d limit = _mm256_set1_pd(kPrequantLimit);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign_bit = _mm256_set1_pd(-0.0);

  const __m256d x = _mm256_div_pd(_mm256_cvtps_pd(f), two_eb);
  mask = _mm256_movemask_pd(_mm256_and_pd(_mm256_cmp_pd(x, neg_limit, _CMP_GT_OQ), _mm256_cmp_pd(x, limit, _CMP_LT_OQ)));
  const __m256d t = _mm256_round_pd(x, _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
  const __m256d frac = _mm256_andnot_pd(sign_bit, _mm256_sub_pd(x, t));
  const __m256d away = _mm256_or_pd(_mm256_and_pd(x, sign_bit), one);
  const __m256d r = _mm256_add_pd(t, _mm256_and_pd(_mm256_cmp_pd(frac, half, _CMP_GE_OQ), away));
  return _mm256_cvttpd_epi32(r);
}

inline __m256i prequant_lane(const float* in, const __m256d two_eb, bool& ok) {
  const __m256 f = _mm256_loadu_ps(in);
  int lo_mask = 0;
  int hi_mask = 0;
  const __m128i lo = prequant_half(_mm256_castps256_ps128(f), two_eb, lo_mask);
  const __m128i hi = prequant_half(_mm256_extractf128_ps(f, 1), two_eb, hi_mask);
  ok = (lo_mask & hi_mask) == 0xF;
  return _mm256_set_m128i(hi, lo);
}

}  // namespace

std::size_t prequantize_avx2(const float* in, std::int32_t* out, std::size_t n, double two_eb_value) {
  const __m256d two_eb = _mm256_set1_pd(two_eb_value);
  std::size_t i = 0;
  bool ok = true;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256i q = prequant_lane(in + i, two_eb, ok);
    if (!ok) return i + prequantize_scalar(in + i, out + i, kLanes, two_eb_value);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), q);
  }
  if (i < n) {
    alignas(32) float lane_in[kLanes] = {};
    alignas(32) std::int32_t lane_out[kLanes];
    const std::size_t rest = n - i;
    for (std::size_t l = 0; l < rest; ++l) lane_in[l] = in[i + l];
    const __m256i q = prequant_lane(lane_in, two_eb, ok);
    if (!ok) return i + prequantize_scalar(in + i, out + i, rest, two_eb_value);
    _mm256_store_si256(reinterpret_cast<__m256i*>(lane_out), q);
    for (std::size_t l = 0; l < rest; ++l) out[i + l] = lane_out[l];
  }
  return n;
}

void postquantize_avx2(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius, std::uint16_t* codes) {
  const __m256i span = _mm256_set1_epi32(radius - 1);
  const __m256i span2 = _mm256_set1_epi32(2 * (radius - 1));
  const __m256i vradius = _mm256_set1_epi32(radius);
  const auto quantize = [&](const __m256i d, const __m256i p, std::uint16_t* dst) {
    const __m256i delta = _mm256_sub_epi32(d, p);
    const __m256i shifted = _mm256_add_epi32(delta, span);
    const __m256i in_range = _mm256_cmpeq_epi32(_mm256_min_epu32(shifted, span2), shifted);
    const __m256i code = _mm256_and_si256(in_range, _mm256_add_epi32(delta, vradius));
    const __m256i packed = _mm256_permute4x64_epi64(_mm256_packus_epi32(code, code), 0x08);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(dst), _mm256_castsi256_si128(packed));
  };
  const auto load = [](const std::int32_t* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); };

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
        const __m256i p = _mm256_add_epi32(load(cur + k - 1), _mm256_sub_epi32(load(up + k), load(up + k - 1)));
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
          const __m256i faces =
              _mm256_add_epi32(_mm256_add_epi32(load(cur + k - 1), load(north + k)), load(below + k));
          const __m256i edges =
              _mm256_add_epi32(_mm256_add_epi32(load(north + k - 1), load(below + k - 1)), load(below_north + k));
          const __m256i p = _mm256_add_epi32(_mm256_sub_epi32(faces, edges), load(below_north + k - 1));
          quantize(load(cur + k), p, dst + k);
        }
      }
    }
  }
}

}  // namespace vlz::kernels
