#include "vlz/padding.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "vlz/dualquant.hpp"

namespace vlz {

namespace {

struct Accumulator {
  std::int64_t min = std::numeric_limits<std::int64_t>::max();
  std::int64_t max = std::numeric_limits<std::int64_t>::min();
  std::int64_t sum = 0;
  std::int64_t count = 0;

  void add(std::int32_t v) {
    min = std::min<std::int64_t>(min, v);
    max = std::max<std::int64_t>(max, v);
    sum += v;
    ++count;
  }
  void merge(const Accumulator& o) {
    min = std::min(min, o.min);
    max = std::max(max, o.max);
    sum += o.sum;
    count += o.count;
  }
};

// Integer mean rounded half away from zero; exact, so independent of summation order.
std::int64_t rounded_mean(std::int64_t sum, std::int64_t count) {
  std::int64_t q = sum / count;
  const std::int64_t r = sum % count;
  if (2 * (r < 0 ? -r : r) >= count) q += sum < 0 ? -1 : 1;
  return q;
}

std::int64_t finalize(const Accumulator& a, PaddingValue kind) {
  if (a.count == 0) return 0;
  switch (kind) {
    case PaddingValue::minimum: return a.min;
    case PaddingValue::maximum: return a.max;
    case PaddingValue::mean: return rounded_mean(a.sum, a.count);
    case PaddingValue::zero: return 0;
  }
  return 0;
}

// Visits every in-bounds element of a block with its in-block coordinates.
template <class Fn>
void for_each_element(const QuantizedGrid& field, const BlockGrid& grid, std::size_t block, Fn&& fn) {
  const auto& desc = field.descriptor;
  const auto o = grid.block_origin(block);
  const auto e = grid.block_extents(block);
  const std::size_t n1 = desc.ndims() >= 2 ? desc.extent(1) : 1;
  const std::size_t n2 = desc.ndims() >= 3 ? desc.extent(2) : 1;
  for (int i = 0; i < e[0]; ++i) {
    for (int j = 0; j < e[1]; ++j) {
      const std::size_t row = ((o[0] + static_cast<std::size_t>(i)) * n1 + o[1] + static_cast<std::size_t>(j)) * n2 + o[2];
      for (int k = 0; k < e[2]; ++k) fn(std::array<int, 3>{i, j, k}, field.values[row + static_cast<std::size_t>(k)]);
    }
  }
}

}  // namespace

std::size_t padding_scalar_count(const PaddingPolicy& policy, const BlockGrid& grid) {
  if (policy.value == PaddingValue::zero) return 0;
  switch (policy.granularity) {
    case PaddingGranularity::global: return 1;
    case PaddingGranularity::block: return grid.block_count();
    case PaddingGranularity::edge: return grid.block_count() * static_cast<std::size_t>(grid.ndims());
  }
  return 0;
}

PaddingScalars compute_padding(const QuantizedGrid& field, const BlockGrid& grid, const PaddingPolicy& policy,
                               int threads) {
  PaddingScalars out{policy, {}};
  if (policy.value == PaddingValue::zero) return out;
  out.scalars.resize(padding_scalar_count(policy, grid));
  const auto blocks = static_cast<std::ptrdiff_t>(grid.block_count());
  const int ndims = grid.ndims();

  switch (policy.granularity) {
    case PaddingGranularity::global: {
      const auto& v = field.values;
      const auto n = static_cast<std::ptrdiff_t>(v.size());
      std::int64_t lo = std::numeric_limits<std::int64_t>::max();
      std::int64_t hi = std::numeric_limits<std::int64_t>::min();
      std::int64_t sum = 0;
#pragma omp parallel for num_threads(threads) schedule(static) reduction(min : lo) reduction(max : hi) reduction(+ : sum)
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::int64_t x = v[static_cast<std::size_t>(i)];
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        sum += x;
      }
      out.scalars[0] = finalize(Accumulator{lo, hi, sum, n}, policy.value);
      break;
    }
    case PaddingGranularity::block:
#pragma omp parallel for num_threads(threads) schedule(static)
      for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        Accumulator acc;
        for_each_element(field, grid, static_cast<std::size_t>(b),
                         [&](const std::array<int, 3>&, std::int32_t x) { acc.add(x); });
        out.scalars[static_cast<std::size_t>(b)] = finalize(acc, policy.value);
      }
      break;
    case PaddingGranularity::edge:
#pragma omp parallel for num_threads(threads) schedule(static)
      for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        std::array<Accumulator, 3> faces;
        for_each_element(field, grid, static_cast<std::size_t>(b), [&](const std::array<int, 3>& c, std::int32_t x) {
          for (int d = 0; d < ndims; ++d) {
            if (c[static_cast<std::size_t>(d)] == 0) faces[static_cast<std::size_t>(d)].add(x);
          }
        });
        for (int d = 0; d < ndims; ++d) {
          out.scalars[static_cast<std::size_t>(b) * static_cast<std::size_t>(ndims) + static_cast<std::size_t>(d)] =
              finalize(faces[static_cast<std::size_t>(d)], policy.value);
        }
      }
      break;
  }
  return out;
}

PaddingScalars compute_padding(std::span<const float> data, const BlockGrid& grid, const PaddingPolicy& policy,
                               double eb) {
  return compute_padding(prequantize(data, grid.descriptor(), eb), grid, policy, 1);
}

std::int64_t halo_scalar(const PaddingScalars& scalars, const BlockGrid& grid, std::size_t block, int dim) {
  if (scalars.policy.value == PaddingValue::zero) return 0;
  std::size_t at = 0;
  switch (scalars.policy.granularity) {
    case PaddingGranularity::global: at = 0; break;
    case PaddingGranularity::block: at = block; break;
    case PaddingGranularity::edge:
      at = block * static_cast<std::size_t>(grid.ndims()) + static_cast<std::size_t>(dim);
      break;
  }
  if (at >= scalars.scalars.size() || block >= grid.block_count() || dim < 0 || dim >= grid.ndims()) {
    throw Error(ErrorCode::internal, "padding scalar index out of range (block " + std::to_string(block) + ", dim " +
                                         std::to_string(dim) + ")");
  }
  return scalars.scalars[at];
}

void apply_padding(const PaddingScalars& scalars, const BlockGrid& grid, std::size_t block, PaddedBlock& tile) {
  std::array<std::int32_t, 3> s{0, 0, 0};
  for (int d = 0; d < grid.ndims(); ++d) {
    s[static_cast<std::size_t>(d)] = static_cast<std::int32_t>(halo_scalar(scalars, grid, block, d));
  }
  std::int32_t* t = tile.tile().data();
  const std::size_t w = static_cast<std::size_t>(tile.edge()) + 1;
  switch (tile.ndims()) {
    case 1:
      t[0] = s[0];
      break;
    case 2:
      std::fill(t, t + w, s[0]);
      for (std::size_t i = 1; i < w; ++i) t[i * w] = s[1];
      break;
    default:
      std::fill(t, t + w * w, s[0]);
      for (std::size_t i = 1; i < w; ++i) {
        std::int32_t* plane = t + i * w * w;
        std::fill(plane, plane + w, s[1]);
        for (std::size_t j = 1; j < w; ++j) plane[j * w] = s[2];
      }
      break;
  }
}

void check_padding(const PaddingScalars& scalars, const BlockGrid& grid) {
  const std::size_t expected = padding_scalar_count(scalars.policy, grid);
  if (scalars.scalars.size() != expected) {
    throw Error(ErrorCode::corrupt_stream, "padding scalar count " + std::to_string(scalars.scalars.size()) +
                                               " does not match policy/grid (" + std::to_string(expected) + ")");
  }
  for (const auto v : scalars.scalars) {
    if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max()) {
      throw Error(ErrorCode::corrupt_stream, "padding scalar outside the pre-quantized range");
    }
  }
}

}  // namespace vlz
