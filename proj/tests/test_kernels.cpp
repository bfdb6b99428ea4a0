#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "vlz/dualquant.hpp"
#include "vlz/kernels.hpp"

using namespace vlz;

namespace {

std::vector<LaneKernel> vector_kernels() {
  std::vector<LaneKernel> out;
  for (const int lanes : {4, 8, 16}) out.push_back(make_kernel(KernelBackend::portable, lanes));
  if (backend_available(KernelBackend::sse41)) out.push_back(make_kernel(KernelBackend::sse41, 4));
  if (backend_available(KernelBackend::avx2)) out.push_back(make_kernel(KernelBackend::avx2, 8));
  if (backend_available(KernelBackend::avx512)) out.push_back(make_kernel(KernelBackend::avx512, 16));
  return out;
}

std::string name(const LaneKernel& k) { return std::string(to_string(k.backend)) + "/" + std::to_string(k.lanes); }

// Values that stress rounding: exact ties, negatives, signed zero, large magnitudes.
std::vector<float> tricky_values(std::mt19937_64& rng, std::size_t n, double eb) {
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<int> step(-4000, 4000);
  std::uniform_real_distribution<float> any(-1e3f, 1e3f);
  std::vector<float> v(n);
  for (auto& x : v) {
    switch (kind(rng)) {
      case 0: x = static_cast<float>((step(rng) + 0.5) * 2.0 * eb); break;
      case 1: x = static_cast<float>(step(rng) * 2.0 * eb); break;
      case 2: x = -0.0f; break;
      case 3: x = static_cast<float>(2.0 * eb * 2147483000.0 * (step(rng) > 0 ? 1 : -1)); break;
      default: x = any(rng);
    }
  }
  return v;
}

}  // namespace

TEST_CASE("backend selection") {
  CHECK(select_kernel(1).backend == KernelBackend::scalar);
  for (const int lanes : {4, 8, 16}) {
    const auto k = select_kernel(lanes);
    CHECK(k.lanes == lanes);
    CHECK(k.prequantize != nullptr);
    CHECK(k.postquantize != nullptr);
  }
  CHECK_THROWS_AS(make_kernel(KernelBackend::portable, 5), Error);
  CHECK_THROWS_AS(make_kernel(KernelBackend::scalar, 8), Error);
  if (backend_available(KernelBackend::avx2)) CHECK_THROWS_AS(make_kernel(KernelBackend::avx2, 16), Error);
  for (const int w : native_lane_widths()) CHECK((w == 4 || w == 8 || w == 16));
  MESSAGE("vector backends under test: " << vector_kernels().size());
}

TEST_CASE("prequantize kernels agree with scalar") {
  std::mt19937_64 rng(31);
  const auto scalar = make_kernel(KernelBackend::scalar, 1);
  for (const auto& k : vector_kernels()) {
    INFO(name(k));
    for (int trial = 0; trial < 400; ++trial) {
      const double eb = trial % 3 == 0 ? 0.25 : trial % 3 == 1 ? 1e-4 : 1e-5;
      const std::size_t n = static_cast<std::size_t>(trial % 67);
      auto data = tricky_values(rng, n, eb);
      if (n > 0 && trial % 5 == 0) {
        const std::size_t bad = static_cast<std::size_t>(rng() % n);
        const float specials[] = {std::numeric_limits<float>::quiet_NaN(), std::numeric_limits<float>::infinity(),
                                  -std::numeric_limits<float>::infinity(), 3e38f};
        data[bad] = specials[trial % 4];
      }
      std::vector<std::int32_t> want(n, -7), got(n, -7);
      const std::size_t fw = scalar.prequantize(data.data(), want.data(), n, 2.0 * eb);
      const std::size_t fg = k.prequantize(data.data(), got.data(), n, 2.0 * eb);
      REQUIRE(fw == fg);
      for (std::size_t i = 0; i < fw; ++i) REQUIRE(want[i] == got[i]);
      for (std::size_t i = 0; i < fw; ++i) {
        REQUIRE(want[i] == oracle::round_half_away(static_cast<double>(data[i]) / (2.0 * eb)));
      }
    }
  }
}

TEST_CASE("postquantize kernels agree with scalar on random tiles") {
  std::mt19937_64 rng(77);
  const auto scalar = make_kernel(KernelBackend::scalar, 1);
  std::uniform_int_distribution<std::int32_t> any(std::numeric_limits<std::int32_t>::min(),
                                                  std::numeric_limits<std::int32_t>::max());
  std::uniform_int_distribution<std::int32_t> near(-40000, 40000);
  for (const auto& k : vector_kernels()) {
    for (int nd = 1; nd <= 3; ++nd) {
      for (const int edge : kBlockEdges) {
        if (k.lanes > edge) continue;
        INFO(name(k) << " nd=" << nd << " edge=" << edge);
        PaddedBlock tile(nd, edge);
        std::size_t ncodes = 1;
        for (int d = 0; d < nd; ++d) ncodes *= static_cast<std::size_t>(edge);
        const int trials = nd == 3 && edge >= 32 ? 3 : 12;
        for (int trial = 0; trial < trials; ++trial) {
          std::array<int, 3> ext{1, 1, 1};
          for (int d = 0; d < nd; ++d) {
            ext[static_cast<std::size_t>(d)] = trial == 0 ? edge : 1 + static_cast<int>(rng() % static_cast<unsigned>(edge));
          }
          tile.set_extents(ext);
          const bool wild = trial % 4 == 3;
          for (auto& v : tile.tile()) v = wild ? any(rng) : near(rng);
          const std::int32_t radius = trial % 3 == 0 ? kDefaultRadius : 2 + static_cast<std::int32_t>(rng() % 2000);
          std::vector<std::uint16_t> want(ncodes, 0xBEEF), got(ncodes, 0xBEEF);
          scalar.postquantize(tile.tile().data(), tile.geometry(), radius, want.data());
          k.postquantize(tile.tile().data(), tile.geometry(), radius, got.data());
          for (int i = 0; i < ext[0]; ++i) {
            for (int j = 0; j < ext[1]; ++j) {
              for (int l = 0; l < ext[2]; ++l) {
                const std::size_t e = static_cast<std::size_t>(edge);
                const std::size_t at = nd == 1 ? static_cast<std::size_t>(i)
                                     : nd == 2 ? static_cast<std::size_t>(i) * e + static_cast<std::size_t>(j)
                                               : (static_cast<std::size_t>(i) * e + static_cast<std::size_t>(j)) * e +
                                                     static_cast<std::size_t>(l);
                REQUIRE(want[at] == got[at]);
              }
            }
          }
        }
      }
    }
  }
}

TEST_CASE("whole pipeline: every backend, edge and shape gives the scalar stream") {
  std::mt19937_64 rng(123);
  const std::vector<std::vector<std::size_t>> shapes{{1},      {10},        {100},       {4097},      {3, 5},
                                                     {64, 64}, {17, 129},   {2, 3, 4},   {9, 33, 17}, {31, 16, 65},
                                                     {64, 64, 64}};
  const std::vector<PaddingPolicy> pads{{PaddingValue::mean, PaddingGranularity::global},
                                        {PaddingValue::zero, PaddingGranularity::global},
                                        {PaddingValue::minimum, PaddingGranularity::edge}};
  int checked = 0;
  for (const auto& dims : shapes) {
    const ArrayDescriptor desc{std::span<const std::size_t>(dims)};
    const auto data = checked % 2 ? oracle::random_field(rng, desc.element_count(), -1e3f, 1e3f)
                                  : oracle::smooth_field(rng, desc.element_count(), 100.0f, 0.05f);
    for (const int edge : kBlockEdges) {
      CompressionConfig c;
      c.error_bound = ErrorBound::absolute(checked % 3 == 0 ? 1e-2 : 1e-4);
      c.block_edge = edge;
      c.padding = pads[static_cast<std::size_t>(checked) % pads.size()];
      const auto ref = dualquant_scalar(data, desc, c);
      for (const auto& k : vector_kernels()) {
        const int lanes = effective_lane_width(k.lanes, edge);
        const LaneKernel kk = lanes == k.lanes ? k : make_kernel(KernelBackend::portable, lanes);
        const auto got = run_dualquant(data, desc, c, c.error_bound.value, kk).stream;
        INFO(name(kk) << " edge=" << edge << " dims=" << dims.size());
        REQUIRE(got == ref);
      }
      ++checked;
    }
  }
  CHECK(checked == static_cast<int>(shapes.size() * kBlockEdges.size()));
}

TEST_CASE("lanes wider than the block edge are rejected") {
  PaddedBlock tile(1, 8);
  tile.set_extents({8, 1, 1});
  CHECK_THROWS_AS(postquantize(tile, kDefaultRadius, make_kernel(KernelBackend::portable, 16)), Error);
}
