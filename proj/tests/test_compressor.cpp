#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "vlz/compressor.hpp"
#include "vlz/container.hpp"
#include "vlz/dualquant.hpp"

using namespace vlz;

namespace {

CompressionConfig config_for(double eb, int edge = 0, int lanes = 1, PaddingPolicy pad = {}) {
  CompressionConfig c;
  c.error_bound = ErrorBound::absolute(eb);
  c.block_edge = edge;
  c.lane_width = lanes;
  c.padding = pad;
  return c;
}

double max_error(const std::vector<float>& a, const std::vector<float>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(static_cast<double>(a[i]) - b[i]));
  return m;
}

}  // namespace

TEST_CASE("error bound holds across shapes and bounds") {
  std::mt19937_64 rng(44);
  for (const auto& dims : std::vector<std::vector<std::size_t>>{{5000}, {70, 65}, {20, 21, 22}}) {
    const ArrayDescriptor desc{std::span<const std::size_t>(dims)};
    for (const double eb : {1e-2, 1e-4, 1e-5}) {
      const auto data = oracle::random_field(rng, desc.element_count(), -300.0f, 300.0f);
      const auto c = compress(data, desc, config_for(eb));
      const auto d = decompress(c.bytes);
      CHECK(d.data.size() == data.size());
      CHECK(max_error(data, d.data) <= eb);
    }
  }
}

TEST_CASE("patches cover fp32 narrowing") {
  // Near |d| in [128, 256] the fp32 spacing is ~1.5e-5, so with eb = 1e-5 many
  // reconstructions land outside the bound after rounding to float.
  std::mt19937_64 rng(7);
  const ArrayDescriptor desc{4096};
  auto data = oracle::random_field(rng, desc.element_count(), 128.0f, 256.0f);
  for (std::size_t i = 0; i < data.size(); i += 2) data[i] = -data[i];
  const auto c = compress(data, desc, config_for(1e-5));
  CHECK(c.report.patches > 0);
  const auto parts = deserialize(c.bytes);
  CHECK(parts.patches.size() == c.report.patches);
  for (const auto& p : parts.patches) CHECK(std::bit_cast<std::uint32_t>(data[p.index]) == p.bits);
  CHECK(max_error(data, decompress(c.bytes).data) <= 1e-5);

  const auto patches = find_patches(data, prequantize(data, desc, 1e-5), 3);
  CHECK(patches == parts.patches);
}

TEST_CASE("idempotent in absolute mode") {
  std::mt19937_64 rng(9);
  const ArrayDescriptor desc{33, 40};
  for (const double eb : {1e-2, 1e-5}) {
    const auto data = oracle::random_field(rng, desc.element_count(), 100.0f, 250.0f);
    const auto once = decompress(compress(data, desc, config_for(eb)).bytes).data;
    const auto twice = decompress(compress(once, desc, config_for(eb)).bytes).data;
    CHECK(once == twice);
  }
}

TEST_CASE("bytes independent of threads and lanes except the header field") {
  std::mt19937_64 rng(10);
  const ArrayDescriptor desc{24, 30, 19};
  const auto data = oracle::smooth_field(rng, desc.element_count(), 3.0f, 0.05f);
  auto base = config_for(1e-3, 8);
  const auto ref = compress(data, desc, base).bytes;
  for (const int threads : {2, 4}) {
    for (const int lanes : {1, 4, 8, 16}) {
      auto c = base;
      c.thread_count = threads;
      c.lane_width = lanes;
      const auto out = compress(data, desc, c).bytes;
      REQUIRE(out.size() == ref.size());
      CHECK(deserialize(out).outliers == deserialize(ref).outliers);
      CHECK(std::equal(out.begin() + 148, out.end() - 4, ref.begin() + 148));
      CHECK(decompress(out, threads).data == decompress(ref).data);
    }
  }
}

TEST_CASE("report matches the container") {
  std::mt19937_64 rng(11);
  const ArrayDescriptor desc{100, 100};
  const auto data = oracle::smooth_field(rng, desc.element_count(), 0.0f, 1.0f);
  const auto c = compress(data, desc, config_for(1e-2));
  CHECK(c.report.container_bytes == c.bytes.size());
  CHECK(c.report.ratio == doctest::Approx(4.0 * 10000 / static_cast<double>(c.bytes.size())).epsilon(1e-12));
  CHECK(c.report.rate_bits == doctest::Approx(8.0 * static_cast<double>(c.bytes.size()) / 10000).epsilon(1e-12));
  CHECK(c.report.block_edge == 16);
  CHECK(c.report.outliers == deserialize(c.bytes).outliers.size());
}

TEST_CASE("relative bound resolves against the value range") {
  std::vector<float> data(1000);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(i % 50) * 0.5f - 3.0f;
  CompressionConfig c;
  c.error_bound = ErrorBound::relative(1e-3);
  const auto out = compress(data, ArrayDescriptor{1000}, c);
  CHECK(out.report.resolved_eb == doctest::Approx(1e-3 * 24.5).epsilon(1e-12));
  const auto d = decompress(out.bytes);
  CHECK(d.header.error_bound.mode == ErrorBoundMode::value_range_relative);
  CHECK(max_error(data, d.data) <= out.report.resolved_eb);

  const std::vector<float> flat(64, 2.0f);
  try {
    compress(flat, ArrayDescriptor{64}, c);
    FAIL("expected degenerate_range");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_range);
  }
}

TEST_CASE("input errors") {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::internal;
  };
  std::vector<float> data(100, 1.0f);
  CHECK(code_of([&] { compress(data, ArrayDescriptor{99}, config_for(1e-3)); }) == ErrorCode::input_size);
  CHECK(code_of([&] { compress(data, ArrayDescriptor{100}, config_for(-1.0)); }) == ErrorCode::config);
  CHECK(code_of([&] { compress(data, ArrayDescriptor{100}, config_for(1e-3, 12)); }) == ErrorCode::config);
  data[40] = std::numeric_limits<float>::infinity();
  CHECK(code_of([&] { compress(data, ArrayDescriptor{100}, config_for(1e-3)); }) == ErrorCode::non_finite);
  data[40] = 3e38f;
  CHECK(code_of([&] { compress(data, ArrayDescriptor{100}, config_for(1e-6)); }) == ErrorCode::bound_too_small);
}

TEST_CASE("autotuned compression records the choice") {
  std::mt19937_64 rng(12);
  const ArrayDescriptor desc{64, 64};
  const auto data = oracle::smooth_field(rng, desc.element_count(), 1.0f, 0.01f);
  CompressOptions o;
  o.config = config_for(1e-3);
  o.autotune = AutotuneSettings{0.5, 2, 3};
  o.space = TuneSpace::make(std::vector<int>{8, 16}, std::vector<int>{4, 8});
  const auto c = compress(data, desc, o);
  REQUIRE(c.report.tune.has_value());
  const auto h = read_header(c.bytes);
  CHECK(h.tuned);
  CHECK(h.block_edge == c.report.tune->chosen.block_edge);
  CHECK(o.space->contains({h.block_edge, h.lane_width}));
  CHECK(c.report.tune->tuning_runtime_fraction > 0.0);
  CHECK(c.report.tune->tuning_runtime_fraction < 1.0);
  CHECK(max_error(data, decompress(c.bytes).data) <= 1e-3);
}
