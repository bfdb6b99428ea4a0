#include "vlz/dualquant.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "kernels/backends.hpp"

namespace vlz {

PaddedBlock::PaddedBlock(int ndims, int edge) : ndims_(ndims), edge_(edge) {
  std::size_t n = 1;
  for (int d = 0; d < ndims; ++d) n *= static_cast<std::size_t>(edge) + 1;
  tile_.assign(n, 0);
  for (int d = 0; d < ndims; ++d) extents_[static_cast<std::size_t>(d)] = edge;
}

TileGeometry PaddedBlock::geometry() const noexcept {
  return TileGeometry{ndims_, edge_, {extents_[0], extents_[1], extents_[2]}};
}

std::size_t PaddedBlock::index(const std::array<int, 3>& c) const noexcept {
  const std::size_t t = static_cast<std::size_t>(edge_) + 1;
  std::size_t idx = 0;
  for (int d = 0; d < ndims_; ++d) idx = idx * t + static_cast<std::size_t>(c[static_cast<std::size_t>(d)] + 1);
  return idx;
}

std::int32_t lorenzo_predict(const std::int32_t* tile, const TileGeometry& geom, const std::array<int, 3>& c) noexcept {
  const std::size_t t = static_cast<std::size_t>(geom.edge) + 1;
  const auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> std::uint32_t {
    switch (geom.ndims) {
      case 1: return static_cast<std::uint32_t>(tile[i]);
      case 2: return static_cast<std::uint32_t>(tile[i * t + j]);
      default: return static_cast<std::uint32_t>(tile[(i * t + j) * t + k]);
    }
  };
  // Tile coordinates of the element itself are c + 1; the neighbours subtract one.
  const std::size_t i = static_cast<std::size_t>(c[0]) + 1;
  const std::size_t j = static_cast<std::size_t>(c[1]) + 1;
  const std::size_t k = static_cast<std::size_t>(c[2]) + 1;
  switch (geom.ndims) {
    case 1: return static_cast<std::int32_t>(at(i - 1, 0, 0));
    case 2: return static_cast<std::int32_t>(at(i, j - 1, 0) + at(i - 1, j, 0) - at(i - 1, j - 1, 0));
    default: {
      const std::uint32_t faces = at(i, j, k - 1) + at(i, j - 1, k) + at(i - 1, j, k);
      const std::uint32_t edges = at(i, j - 1, k - 1) + at(i - 1, j, k - 1) + at(i - 1, j - 1, k);
      return static_cast<std::int32_t>(faces - edges + at(i - 1, j - 1, k - 1));
    }
  }
}

std::int32_t lorenzo_predict(const PaddedBlock& block, const std::array<int, 3>& c) noexcept {
  return lorenzo_predict(block.tile().data(), block.geometry(), c);
}

namespace {

[[noreturn]] void throw_prequant_fault(std::span<const float> data, std::size_t index, double eb) {
  const float v = data[index];
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::non_finite, "non-finite input value at index " + std::to_string(index));
  }
  throw Error(ErrorCode::bound_too_small, "error bound too small for data magnitude at index " +
                                              std::to_string(index) + " (value " + std::to_string(v) +
                                              ", eb " + std::to_string(eb) + ")");
}

void check_eb(double eb) {
  if (!(eb > 0.0) || !std::isfinite(eb)) throw Error(ErrorCode::config, "resolved error bound must be positive");
}

}  // namespace

std::int32_t prequantize_value(float d, double eb) {
  check_eb(eb);
  std::int32_t q = 0;
  if (kernels::prequantize_scalar(&d, &q, 1, 2.0 * eb) == 1) return q;
  throw_prequant_fault(std::span<const float>(&d, 1), 0, eb);
}

QuantizedGrid prequantize(std::span<const float> data, const ArrayDescriptor& desc, double eb,
                          const LaneKernel& kernel, int threads) {
  check_eb(eb);
  if (data.size() != desc.element_count()) {
    throw Error(ErrorCode::input_size, "data length " + std::to_string(data.size()) + " does not match descriptor (" +
                                           std::to_string(desc.element_count()) + ")");
  }
  QuantizedGrid q{desc, eb, std::vector<std::int32_t>(data.size())};
  constexpr std::size_t kChunk = std::size_t{1} << 16;
  const std::size_t n = data.size();
  const auto chunks = static_cast<std::ptrdiff_t>((n + kChunk - 1) / kChunk);
  const double two_eb = 2.0 * eb;
  std::size_t first_fault = n;
#pragma omp parallel for num_threads(threads) schedule(static) reduction(min : first_fault)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t len = std::min(kChunk, n - begin);
    const std::size_t at = kernel.prequantize(data.data() + begin, q.values.data() + begin, len, two_eb);
    if (at < len) first_fault = std::min(first_fault, begin + at);
  }
  if (first_fault < n) throw_prequant_fault(data, first_fault, eb);
  return q;
}

QuantizedGrid prequantize(std::span<const float> data, const ArrayDescriptor& desc, double eb) {
  return prequantize(data, desc, eb, make_kernel(KernelBackend::scalar, 1), 1);
}

namespace {

// Calls fn(tile_base, code_base, row_index) for every in-bounds row of a block tile.
template <class Fn>
void for_each_row(const TileGeometry& g, Fn&& fn) {
  const std::size_t t = static_cast<std::size_t>(g.edge) + 1;
  const std::size_t b = static_cast<std::size_t>(g.edge);
  switch (g.ndims) {
    case 1:
      fn(std::size_t{1}, std::size_t{0}, g.extents[0]);
      break;
    case 2:
      for (std::size_t i = 0; i < static_cast<std::size_t>(g.extents[0]); ++i) fn((i + 1) * t + 1, i * b, g.extents[1]);
      break;
    default:
      for (std::size_t i = 0; i < static_cast<std::size_t>(g.extents[0]); ++i) {
        for (std::size_t j = 0; j < static_cast<std::size_t>(g.extents[1]); ++j) {
          fn(((i + 1) * t + j + 1) * t + 1, (i * b + j) * b, g.extents[2]);
        }
      }
      break;
  }
}

// Pairs each in-bounds tile row with the linear index of its first source element.
template <class Fn>
void for_each_row_pair(const BlockGrid& grid, std::size_t block, const TileGeometry& g, Fn&& fn) {
  const auto& desc = grid.descriptor();
  const auto o = grid.block_origin(block);
  const std::size_t t = static_cast<std::size_t>(g.edge) + 1;
  switch (g.ndims) {
    case 1:
      fn(o[0], std::size_t{1}, g.extents[0]);
      break;
    case 2:
      for (std::size_t i = 0; i < static_cast<std::size_t>(g.extents[0]); ++i) {
        fn((o[0] + i) * desc.extent(1) + o[1], (i + 1) * t + 1, g.extents[1]);
      }
      break;
    default:
      for (std::size_t i = 0; i < static_cast<std::size_t>(g.extents[0]); ++i) {
        for (std::size_t j = 0; j < static_cast<std::size_t>(g.extents[1]); ++j) {
          fn(((o[0] + i) * desc.extent(1) + o[1] + j) * desc.extent(2) + o[2], ((i + 1) * t + j + 1) * t + 1,
             g.extents[2]);
        }
      }
      break;
  }
}

void replicate_tail(std::int32_t* row, int length, int edge) {
  const std::int32_t last = row[length - 1];
  for (int k = length; k < edge; ++k) row[k] = last;
}

std::size_t emit_block(const PaddedBlock& tile, const std::uint16_t* codes, std::uint16_t* out,
                       std::vector<std::int32_t>& outliers) {
  const std::int32_t* t = tile.tile().data();
  std::size_t written = 0;
  std::size_t found = 0;
  for_each_row(tile.geometry(), [&](std::size_t tile_base, std::size_t code_base, int length) {
    const std::uint16_t* src = codes + code_base;
    std::memcpy(out + written, src, static_cast<std::size_t>(length) * sizeof(std::uint16_t));
    for (int k = 0; k < length; ++k) {
      if (src[k] == 0) {
        outliers.push_back(t[tile_base + static_cast<std::size_t>(k)]);
        ++found;
      }
    }
    written += static_cast<std::size_t>(length);
  });
  return found;
}

std::size_t code_tile_size(int ndims, int edge) {
  std::size_t n = 1;
  for (int d = 0; d < ndims; ++d) n *= static_cast<std::size_t>(edge);
  return n;
}

void check_kernel_fits(const LaneKernel& kernel, int edge) {
  if (kernel.lanes > edge) {
    throw Error(ErrorCode::config, "lane width " + std::to_string(kernel.lanes) + " exceeds block edge " +
                                       std::to_string(edge));
  }
}

}  // namespace

BlockCodes postquantize(const PaddedBlock& block, std::int32_t radius, const LaneKernel& kernel) {
  check_kernel_fits(kernel, block.edge());
  std::vector<std::uint16_t> scratch(code_tile_size(block.ndims(), block.edge()));
  kernel.postquantize(block.tile().data(), block.geometry(), radius, scratch.data());
  const auto& e = block.extents();
  std::size_t n = 1;
  for (int d = 0; d < block.ndims(); ++d) n *= static_cast<std::size_t>(e[static_cast<std::size_t>(d)]);
  BlockCodes out;
  out.codes.resize(n);
  emit_block(block, scratch.data(), out.codes.data(), out.outliers);
  return out;
}

BlockCodes postquantize(const PaddedBlock& block, std::int32_t radius) {
  return postquantize(block, radius, make_kernel(KernelBackend::scalar, 1));
}

void stage_block(const QuantizedGrid& field, const BlockGrid& grid, std::size_t block, PaddedBlock& tile) {
  tile.set_extents(grid.block_extents(block));
  std::int32_t* t = tile.tile().data();
  const int edge = tile.edge();
  for_each_row_pair(grid, block, tile.geometry(), [&](std::size_t src, std::size_t dst, int length) {
    std::memcpy(t + dst, field.values.data() + src, static_cast<std::size_t>(length) * sizeof(std::int32_t));
    replicate_tail(t + dst, length, edge);
  });
}

CodeStream postquantize_field(const QuantizedGrid& field, const BlockGrid& grid, const PaddingScalars& padding,
                              std::int32_t radius, const LaneKernel& kernel, int threads) {
  check_kernel_fits(kernel, grid.block_edge());
  check_padding(padding, grid);
  CodeStream stream;
  stream.codes.resize(field.values.size());
  stream.block_outlier_counts.resize(grid.block_count());
  const std::size_t blocks = grid.block_count();
  std::vector<std::vector<std::int32_t>> per_thread;

#pragma omp parallel num_threads(threads)
  {
    const auto nthreads = static_cast<std::size_t>(omp_get_num_threads());
    const auto id = static_cast<std::size_t>(omp_get_thread_num());
#pragma omp single
    per_thread.resize(nthreads);

    // Contiguous block ranges per thread keep the outlier list in canonical order.
    const std::size_t begin = blocks * id / nthreads;
    const std::size_t end = blocks * (id + 1) / nthreads;
    PaddedBlock tile(grid.ndims(), grid.block_edge());
    std::vector<std::uint16_t> codes(code_tile_size(grid.ndims(), grid.block_edge()));
    auto& outliers = per_thread[id];
    for (std::size_t blk = begin; blk < end; ++blk) {
      stage_block(field, grid, blk, tile);
      apply_padding(padding, grid, blk, tile);
      kernel.postquantize(tile.tile().data(), tile.geometry(), radius, codes.data());
      stream.block_outlier_counts[blk] = static_cast<std::uint32_t>(
          emit_block(tile, codes.data(), stream.codes.data() + grid.block_offset(blk), outliers));
    }
  }
  std::size_t total = 0;
  for (const auto& v : per_thread) total += v.size();
  stream.outliers.reserve(total);
  for (const auto& v : per_thread) stream.outliers.insert(stream.outliers.end(), v.begin(), v.end());
  return stream;
}

DualQuantResult run_dualquant(std::span<const float> data, const ArrayDescriptor& desc,
                              const CompressionConfig& config, double resolved_eb, const LaneKernel& kernel) {
  config.validate();
  const BlockGrid grid(desc, config.block_edge_for(desc.ndims()));
  DualQuantResult r;
  r.field = prequantize(data, desc, resolved_eb, kernel, config.thread_count);
  r.padding = compute_padding(r.field, grid, config.padding, config.thread_count);
  r.stream = postquantize_field(r.field, grid, r.padding, config.radius, kernel, config.thread_count);
  return r;
}

CodeStream dualquant_scalar(std::span<const float> data, const ArrayDescriptor& desc, const CompressionConfig& config) {
  const double eb = resolve_error_bound(config.error_bound, data);
  return run_dualquant(data, desc, config, eb, make_kernel(KernelBackend::scalar, 1)).stream;
}

CodeStream dualquant_vector(std::span<const float> data, const ArrayDescriptor& desc, const CompressionConfig& config) {
  if (config.lane_width != 4 && config.lane_width != 8 && config.lane_width != 16) {
    throw Error(ErrorCode::config, "vector kernel needs lane width 4, 8 or 16 (got " +
                                       std::to_string(config.lane_width) + ")");
  }
  const int edge = config.block_edge_for(desc.ndims());
  const double eb = resolve_error_bound(config.error_bound, data);
  return run_dualquant(data, desc, config, eb, select_kernel(effective_lane_width(config.lane_width, edge))).stream;
}

BlockWorkspace::BlockWorkspace(int ndims, int edge) : tile_(ndims, edge), codes_(code_tile_size(ndims, edge)) {}

std::size_t dualquant_blocks(std::span<const float> data, const BlockGrid& grid, std::span<const std::size_t> blocks,
                             double eb, std::int32_t radius, const LaneKernel& kernel, BlockWorkspace& workspace) {
  check_kernel_fits(kernel, grid.block_edge());
  auto& tile = workspace.tile();
  std::int32_t* t = tile.tile().data();
  const int edge = grid.block_edge();
  const double two_eb = 2.0 * eb;
  std::size_t outliers = 0;
  for (const std::size_t blk : blocks) {
    tile.set_extents(grid.block_extents(blk));
    for_each_row_pair(grid, blk, tile.geometry(), [&](std::size_t src, std::size_t dst, int length) {
      const auto len = static_cast<std::size_t>(length);
      const std::size_t at = kernel.prequantize(data.data() + src, t + dst, len, two_eb);
      if (at < len) throw_prequant_fault(data, src + at, eb);
      replicate_tail(t + dst, length, edge);
    });
    kernel.postquantize(t, tile.geometry(), radius, workspace.codes().data());
    for_each_row(tile.geometry(), [&](std::size_t, std::size_t code_base, int length) {
      const std::uint16_t* c = workspace.codes().data() + code_base;
      for (int k = 0; k < length; ++k) outliers += c[k] == 0;
    });
  }
  return outliers;
}

}  // namespace vlz
