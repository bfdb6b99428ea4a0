#include <doctest.h>

#include <random>
#include <vector>

#include "oracle.hpp"
#include "vlz/dualquant.hpp"
#include "vlz/metrics.hpp"
#include "vlz/padding.hpp"

using namespace vlz;

namespace {

const PaddingPolicy kZero{PaddingValue::zero, PaddingGranularity::global};

std::vector<PaddingPolicy> every_policy() {
  std::vector<PaddingPolicy> v;
  for (auto k : {PaddingValue::zero, PaddingValue::minimum, PaddingValue::maximum, PaddingValue::mean}) {
    for (auto g : {PaddingGranularity::global, PaddingGranularity::block, PaddingGranularity::edge}) v.push_back({k, g});
  }
  return v;
}

std::size_t outliers_with(const std::vector<float>& data, const ArrayDescriptor& desc, double eb, int edge,
                          PaddingPolicy pad) {
  CompressionConfig c;
  c.error_bound = ErrorBound::absolute(eb);
  c.block_edge = edge;
  c.padding = pad;
  return dualquant_scalar(data, desc, c).outliers.size();
}

}  // namespace

TEST_CASE("scalar count formulas") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int nd = 1 + trial % 3;
    std::vector<std::size_t> dims;
    for (int d = 0; d < nd; ++d) dims.push_back(1 + rng() % 90);
    const ArrayDescriptor desc{std::span<const std::size_t>(dims)};
    const BlockGrid grid(desc, 16);
    const QuantizedGrid field{desc, 1.0, std::vector<std::int32_t>(desc.element_count(), 1)};
    for (const auto& p : every_policy()) {
      const std::size_t want = p.value == PaddingValue::zero                ? 0
                               : p.granularity == PaddingGranularity::global ? 1
                               : p.granularity == PaddingGranularity::block  ? grid.block_count()
                                                                             : grid.block_count() * static_cast<std::size_t>(nd);
      CHECK(padding_scalar_count(p, grid) == want);
      CHECK(compute_padding(field, grid, p).scalars.size() == want);
    }
  }
}

TEST_CASE("padding examples") {
  const ArrayDescriptor flat_desc{64};
  const std::vector<float> flat(64, 100.0f);
  const BlockGrid flat_grid(flat_desc, 8);
  CHECK(compute_padding(flat, flat_grid, kZero, 1e-4).scalars.empty());
  const auto mean = compute_padding(flat, flat_grid, {}, 1e-4);
  REQUIRE(mean.scalars.size() == 1);
  CHECK(mean.scalars[0] == 500000);

  std::vector<float> ramp(16);
  for (int i = 0; i < 16; ++i) ramp[static_cast<std::size_t>(i)] = static_cast<float>(i);
  const BlockGrid ramp_grid(ArrayDescriptor{16}, 8);
  const auto mins = compute_padding(ramp, ramp_grid, {PaddingValue::minimum, PaddingGranularity::block}, 0.01);
  REQUIRE(mins.scalars.size() == 2);
  CHECK(mins.scalars[0] == prequantize_value(0.0f, 0.01));
  CHECK(mins.scalars[1] == prequantize_value(8.0f, 0.01));
  const auto maxs = compute_padding(ramp, ramp_grid, {PaddingValue::maximum, PaddingGranularity::block}, 0.01);
  CHECK(maxs.scalars == std::vector<std::int64_t>{350, 750});
}

TEST_CASE("statistics match the brute-force oracle") {
  std::mt19937_64 rng(8);
  for (const auto& dims : std::vector<std::vector<std::size_t>>{{77}, {19, 23}, {9, 10, 11}}) {
    const ArrayDescriptor desc{std::span<const std::size_t>(dims)};
    const auto data = oracle::random_field(rng, desc.element_count(), -5.0f, 5.0f);
    const auto q = oracle::prequantize(data, 1e-3);
    const auto shape = oracle::shape_of(desc);
    for (const int edge : {8, 16}) {
      const BlockGrid grid(desc, edge);
      const auto blocks = oracle::blocks_of(shape, edge);
      for (const auto& p : every_policy()) {
        if (p.value == PaddingValue::zero) continue;
        const auto got = compute_padding(data, grid, p, 1e-3);
        const auto want = oracle::halo(shape, q, blocks, p);
        for (std::size_t b = 0; b < grid.block_count(); ++b) {
          for (int d = 0; d < desc.ndims(); ++d) {
            CHECK(halo_scalar(got, grid, b, d) == want[b][static_cast<std::size_t>(d)]);
          }
        }
      }
    }
  }
}

TEST_CASE("mean of d° rounds half away from zero") {
  const ArrayDescriptor desc{2};
  const BlockGrid grid(desc, 8);
  // d° = {1, 2} -> 1.5 -> 2 ; {-1, -2} -> -1.5 -> -2
  CHECK(compute_padding(QuantizedGrid{desc, 1.0, {1, 2}}, grid, {}).scalars[0] == 2);
  CHECK(compute_padding(QuantizedGrid{desc, 1.0, {-1, -2}}, grid, {}).scalars[0] == -2);
  CHECK(compute_padding(QuantizedGrid{desc, 1.0, {-1, 2}}, grid, {}).scalars[0] == 1);
}

TEST_CASE("apply_padding halo layout") {
  SUBCASE("2D edge: north face dim 0, west face dim 1") {
    const ArrayDescriptor desc{8, 8};
    const BlockGrid grid(desc, 8);
    const PaddingScalars s{{PaddingValue::mean, PaddingGranularity::edge}, {11, 22}};
    PaddedBlock tile(2, 8);
    tile.set_extents(grid.block_extents(0));
    apply_padding(s, grid, 0, tile);
    for (int j = -1; j < 8; ++j) CHECK(tile.at({-1, j, 0}) == 11);
    for (int i = 0; i < 8; ++i) CHECK(tile.at({i, -1, 0}) == 22);
  }
  SUBCASE("3D edge faces and corners") {
    const ArrayDescriptor desc{8, 8, 8};
    const BlockGrid grid(desc, 8);
    const PaddingScalars s{{PaddingValue::mean, PaddingGranularity::edge}, {1, 2, 3}};
    PaddedBlock tile(3, 8);
    tile.set_extents(grid.block_extents(0));
    apply_padding(s, grid, 0, tile);
    for (int a = -1; a < 8; ++a) {
      for (int b = -1; b < 8; ++b) {
        CHECK(tile.at({-1, a, b}) == 1);
        if (a >= 0) {
          CHECK(tile.at({a, -1, b}) == 2);
          if (b >= 0) CHECK(tile.at({a, b, -1}) == 3);
        }
      }
    }
  }
  SUBCASE("global: every block sees the same halo") {
    const ArrayDescriptor desc{20, 20};
    const BlockGrid grid(desc, 8);
    const PaddingScalars s{{}, {-9}};
    for (std::size_t b = 0; b < grid.block_count(); ++b) {
      PaddedBlock tile(2, 8);
      tile.set_extents(grid.block_extents(b));
      apply_padding(s, grid, b, tile);
      CHECK(tile.at({-1, -1, 0}) == -9);
      CHECK(tile.at({3, -1, 0}) == -9);
    }
  }
  SUBCASE("out of range lookups") {
    const BlockGrid grid(ArrayDescriptor{20}, 8);
    const PaddingScalars s{{PaddingValue::mean, PaddingGranularity::block}, {1, 2}};
    CHECK_THROWS_AS(check_padding(s, grid), Error);
    try {
      halo_scalar(s, grid, 2, 0);
      FAIL("expected internal error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::internal);
    }
  }
}

TEST_CASE("constant fields: non-zero padding never adds outliers") {
  for (const auto& dims : std::vector<std::vector<std::size_t>>{{100}, {30, 41}, {9, 17, 12}}) {
    const ArrayDescriptor desc{std::span<const std::size_t>(dims)};
    const std::vector<float> flat(desc.element_count(), 100.0f);
    for (const int edge : kBlockEdges) {
      const std::size_t zero = outliers_with(flat, desc, 1e-4, edge, kZero);
      CHECK(zero == BlockGrid(desc, edge).block_count());
      for (const auto& p : every_policy()) CHECK(outliers_with(flat, desc, 1e-4, edge, p) <= zero);
      CHECK(outliers_with(flat, desc, 1e-4, edge, {PaddingValue::mean, PaddingGranularity::block}) == 0);
    }
  }
  const std::vector<float> zeros(64, 0.0f);
  CHECK(outliers_with(zeros, ArrayDescriptor{64}, 1e-4, 8, kZero) == 0);
}

TEST_CASE("block mean reduces border unpredictables in a high-offset block") {
  // 8x8 block of values around 0.66-0.99 at eb 1e-5: d° ≈ 33000-49500, beyond the radius
  // from a zero halo, so every border element is an outlier under zero padding.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> jitter(-0.002f, 0.002f);
  const ArrayDescriptor desc{8, 8};
  std::vector<float> block(64);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) block[static_cast<std::size_t>(i * 8 + j)] = 0.66f + 0.0045f * (i * 8 + j) + jitter(rng);
  }
  CompressionConfig c;
  c.error_bound = ErrorBound::absolute(1e-5);
  c.block_edge = 8;
  c.padding = kZero;
  const auto zero = dualquant_scalar(block, desc, c);
  c.padding = {PaddingValue::mean, PaddingGranularity::block};
  const auto mean = dualquant_scalar(block, desc, c);
  const BlockGrid grid(desc, 8);
  const auto rz = outlier_report(zero, grid);
  const auto rm = outlier_report(mean, grid);
  CHECK(rz.border_outliers > 0);
  CHECK(rm.border_outliers < rz.border_outliers);
}
