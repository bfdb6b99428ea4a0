// 16-lane (512-bit) kernels, AVX-512F only.

#include <immintrin.h>

#include "kernels/backends.hpp"

namespace vlz::kernels {
namespace {

constexpr int kLanes = 16;

inline __m256i prequant_half(const __m256 f, const __m512d two_eb, __mmask8& mask) {
  const __m512d neg_limit = _mm512_set1_pd(-kPrequantLimit);
  const __m512d limit = _mm512_set1_pd(kPrequantLimit);
  const __m512d half = _mm512_set1_pd(0.5);
  const __m512i one = _mm512_castpd_si512(_mm512_set1_pd(1.0));
  const __m512i sign_bit = _mm512_castpd_si512(_mm512_set1_pd(-0.0));

  const __m512d x = _mm512_div_pd(_mm512_cvtps_pd(f), two_eb);
  mask = _mm512_cmp_pd_mask(x, neg_limit, _CMP_GT_OQ) & _mm512_cmp_pd_mask(x, limit, _CMP_LT_OQ);
  const __m512d t = _mm512_roundscale_pd(x, _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
  const __m512d frac = _mm512_abs_pd(_mm512_sub_pd(x, t));
  const __m512d away = _mm512_castsi512_pd(_mm512_or_si512(_mm512_and_si512(_mm512_castpd_si512(x), sign_bit), one));
  const __m512d r = _mm512_mask_add_pd(t, _mm512_cmp_pd_mask(frac, half, _CMP_GE_OQ), t, away);
  return _mm512_cvttpd_epi32(r);
}

inline __m512i prequant_lane(const float* in, const __m512d two_eb, bool& ok) {
  const __m512 f = _mm512_loadu_ps(in);
  __mmask8 lo_mask = 0;
  __mmask8 hi_mask = 0;
  const __m256i lo = prequant_half(_mm512_castps512_ps256(f), two_eb, lo_mask);
  const __m256 upper = _mm256_castpd_ps(_mm512_extractf64x4_pd(_mm512_castps_pd(f), 1));
  const __m256i hi = prequant_half(upper, two_eb, hi_mask);
  ok = (lo_mask & hi_mask) == 0xFF;
  return _mm512_inserti64x4(_mm512_castsi256_si512(lo), hi, 1);
}

}  // namespace

std::size_t prequantize_avx512(const float* in, std::int32_t* out, std::size_t n, double two_eb_value) {
  const __m512d two_eb = _mm512_set1_pd(two_eb_value);
  std::size_t i = 0;
  bool ok = true;
  for (; i + kLanes <= n; i += kLanes) {
    const __m512i q = prequant_lane(in + i, two_eb, ok);
    if (!ok) return i + prequantize_scalar(in + i, out + i, kLanes, two_eb_value);
    _mm512_storeu_si512(out + i, q);
  }
  if (i < n) {
    alignas(64) float lane_in[kLanes] = {};
    alignas(64) std::int32_t lane_out[kLanes];
    const std::size_t rest = n - i;
    for (std::size_t l = 0; l < rest; ++l) lane_in[l] = in[i + l];
    const __m512i q = prequant_lane(lane_in, two_eb, ok);
    if (!ok) return i + prequantize_scalar(in + i, out + i, rest, two_eb_value);
    _mm512_store_si512(lane_out, q);
    for (std::size_t l = 0; l < rest; ++l) out[i + l] = lane_out[l];
  }
  return n;
}

void postquantize_avx512(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                         std::uint16_t* codes) {
  const __m512i span = _mm512_set1_epi32(radius - 1);
  const __m512i span2 = _mm512_set1_epi32(2 * (radius - 1));
  const __m512i vradius = _mm512_set1_epi32(radius);
  const auto quantize = [&](const __m512i d, const __m512i p, std::uint16_t* dst) {
    const __m512i delta = _mm512_sub_epi32(d, p);
    const __mmask16 in_range = _mm512_cmple_epu32_mask(_mm512_add_epi32(delta, span), span2);
    const __m512i code = _mm512_maskz_add_epi32(in_range, delta, vradius);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst), _mm512_cvtepi32_epi16(code));
  };
  const auto load = [](const std::int32_t* p) { return _mm512_loadu_si512(p); };

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
        const __m512i p = _mm512_add_epi32(load(cur + k - 1), _mm512_sub_epi32(load(up + k), load(up + k - 1)));
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
          const __m512i faces =
              _mm512_add_epi32(_mm512_add_epi32(load(cur + k - 1), load(north + k)), load(below + k));
          const __m512i edges =
              _mm512_add_epi32(_mm512_add_epi32(load(north + k - 1), load(below + k - 1)), load(below_north + k));
          const __m512i p = _mm512_add_epi32(_mm512_sub_epi32(faces, edges), load(below_north + k - 1));
          quantize(load(cur + k), p, dst + k);
        }
      }
    }
  }
}

}  // namespace vlz::kernels
