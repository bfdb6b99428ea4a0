#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vlz/types.hpp"

namespace vlz {

class PaddedBlock;

/// Pre-quantized padding scalars. Layout per granularity:
/// global -> 1, block -> block_count, edge -> block_count * ndims (block-major, dim-minor).
/// Zero padding stores nothing.
struct PaddingScalars {
  PaddingPolicy policy{};
  std::vector<std::int64_t> scalars;

  friend bool operator==(const PaddingScalars&, const PaddingScalars&) = default;
};

std::size_t padding_scalar_count(const PaddingPolicy& policy, const BlockGrid& grid);

/// Statistics are taken over the in-bounds d° values of the field (global), of each
/// block (block), or of each block's low-index face per dimension (edge). Means are
/// rounded half away from zero.
PaddingScalars compute_padding(const QuantizedGrid& field, const BlockGrid& grid, const PaddingPolicy& policy,
                               int threads = 1);

/// Convenience overload that pre-quantizes `data` with `eb` first.
PaddingScalars compute_padding(std::span<const float> data, const BlockGrid& grid, const PaddingPolicy& policy,
                               double eb);

/// Halo scalar for a block's face along `dim`.
std::int64_t halo_scalar(const PaddingScalars& scalars, const BlockGrid& grid, std::size_t block, int dim);

/// Fills the low-index halo faces of `tile`. Halo cells on more than one face (corners)
/// take the scalar of the lowest such dimension.
void apply_padding(const PaddingScalars& scalars, const BlockGrid& grid, std::size_t block, PaddedBlock& tile);

/// Validates the scalar list length against the grid; throws corrupt_stream otherwise.
void check_padding(const PaddingScalars& scalars, const BlockGrid& grid);

}  // namespace vlz
