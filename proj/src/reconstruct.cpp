#include "vlz/reconstruct.hpp"

#include <omp.h>

#include <exception>
#include <string>

namespace vlz {

std::size_t reconstruct_block(std::span<const std::uint16_t> codes, std::span<const std::int32_t> outliers,
                              std::int32_t radius, PaddedBlock& tile) {
  const auto& e = tile.extents();
  const auto r = static_cast<std::uint32_t>(radius);
  const auto capacity = static_cast<std::uint32_t>(2 * radius);
  std::size_t at = 0;
  std::size_t used = 0;
  for (int i = 0; i < e[0]; ++i) {
    for (int j = 0; j < e[1]; ++j) {
      for (int k = 0; k < e[2]; ++k) {
        const std::array<int, 3> c{i, j, k};
        if (at >= codes.size()) throw Error(ErrorCode::corrupt_stream, "code stream shorter than block");
        const std::uint32_t code = codes[at++];
        std::int32_t dq;
        if (code == 0) {
          if (used >= outliers.size()) throw Error(ErrorCode::corrupt_stream, "outlier list exhausted");
          dq = outliers[used++];
        } else {
          if (code >= capacity) {
            throw Error(ErrorCode::corrupt_stream, "quantization code " + std::to_string(code) + " >= 2R");
          }
          const auto pred = static_cast<std::uint32_t>(lorenzo_predict(tile, c));
          dq = static_cast<std::int32_t>(pred + (code - r));
        }
        tile.at(c) = dq;
      }
    }
  }
  return used;
}

namespace {

// Visits blocks in parallel, staging each tile and calling sink(block, tile) after decode.
template <class Sink>
void decode_blocks(const CodeStream& stream, const BlockGrid& grid, const PaddingScalars& padding,
                   std::int32_t radius, int threads, Sink&& sink) {
  check_padding(padding, grid);
  const std::size_t n = grid.descriptor().element_count();
  if (stream.codes.size() != n) {
    throw Error(ErrorCode::corrupt_stream, "code count " + std::to_string(stream.codes.size()) +
                                               " does not match element count " + std::to_string(n));
  }
  if (stream.block_outlier_counts.size() != grid.block_count()) {
    throw Error(ErrorCode::corrupt_stream, "per-block outlier table has wrong length");
  }
  std::vector<std::size_t> start(grid.block_count() + 1, 0);
  for (std::size_t b = 0; b < grid.block_count(); ++b) start[b + 1] = start[b] + stream.block_outlier_counts[b];
  if (start.back() != stream.outliers.size()) {
    throw Error(ErrorCode::corrupt_stream, "per-block outlier counts do not sum to the outlier list length");
  }

  const auto blocks = static_cast<std::ptrdiff_t>(grid.block_count());
  std::exception_ptr failure;
  std::ptrdiff_t failed_block = blocks;
#pragma omp parallel num_threads(threads)
  {
    PaddedBlock tile(grid.ndims(), grid.block_edge());
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
      const auto blk = static_cast<std::size_t>(b);
      try {
        tile.set_extents(grid.block_extents(blk));
        apply_padding(padding, grid, blk, tile);
        const std::span<const std::uint16_t> codes(stream.codes.data() + grid.block_offset(blk), grid.block_elements(blk));
        const std::span<const std::int32_t> outliers(stream.outliers.data() + start[blk], start[blk + 1] - start[blk]);
        const std::size_t used = reconstruct_block(codes, outliers, radius, tile);
        if (used != outliers.size()) {
          throw Error(ErrorCode::corrupt_stream, "block " + std::to_string(blk) + " consumed " + std::to_string(used) +
                                                     " of " + std::to_string(outliers.size()) + " outliers");
        }
        sink(blk, tile);
      } catch (...) {
#pragma omp critical(vlz_decode_failure)
        if (b < failed_block) {
          failed_block = b;
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Calls fn(linear_index, tile_value) over a decoded block's in-bounds elements.
template <class Fn>
void scatter_block(const BlockGrid& grid, std::size_t blk, const PaddedBlock& tile, Fn&& fn) {
  const auto& desc = grid.descriptor();
  const auto o = grid.block_origin(blk);
  const auto& e = tile.extents();
  const std::size_t n1 = desc.ndims() >= 2 ? desc.extent(1) : 1;
  const std::size_t n2 = desc.ndims() >= 3 ? desc.extent(2) : 1;
  for (int i = 0; i < e[0]; ++i) {
    for (int j = 0; j < e[1]; ++j) {
      const std::size_t row = ((o[0] + static_cast<std::size_t>(i)) * n1 + o[1] + static_cast<std::size_t>(j)) * n2 + o[2];
      for (int k = 0; k < e[2]; ++k) fn(row + static_cast<std::size_t>(k), tile.at({i, j, k}));
    }
  }
}

}  // namespace

void reconstruct_field(const CodeStream& stream, const BlockGrid& grid, const PaddingScalars& padding, double eb,
                       std::int32_t radius, std::span<float> out, int threads) {
  if (out.size() != grid.descriptor().element_count()) {
    throw Error(ErrorCode::internal, "reconstruction buffer has wrong length");
  }
  decode_blocks(stream, grid, padding, radius, threads, [&](std::size_t blk, const PaddedBlock& tile) {
    scatter_block(grid, blk, tile, [&](std::size_t at, std::int32_t dq) { out[at] = reconstruct_value(dq, eb); });
  });
}

QuantizedGrid reconstruct_quantized(const CodeStream& stream, const BlockGrid& grid, const PaddingScalars& padding,
                                    double eb, std::int32_t radius, int threads) {
  QuantizedGrid q{grid.descriptor(), eb, std::vector<std::int32_t>(grid.descriptor().element_count())};
  decode_blocks(stream, grid, padding, radius, threads, [&](std::size_t blk, const PaddedBlock& tile) {
    scatter_block(grid, blk, tile, [&](std::size_t at, std::int32_t dq) { q.values[at] = dq; });
  });
  return q;
}

}  // namespace vlz
