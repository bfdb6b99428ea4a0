#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vlz/dualquant.hpp"
#include "vlz/padding.hpp"
#include "vlz/types.hpp"

namespace vlz {

/// Sequentially rebuilds the d° values of one block inside `tile`, whose halo must already
/// hold the padding scalars. `codes` covers exactly the block's in-bounds elements in
/// row-major order. Returns the number of outliers consumed; throws corrupt_stream on a
/// code >= 2R or an exhausted outlier list.
std::size_t reconstruct_block(std::span<const std::uint16_t> codes, std::span<const std::int32_t> outliers,
                              std::int32_t radius, PaddedBlock& tile);

/// Block-parallel reconstruction of a whole field into `out` (row-major, length N).
void reconstruct_field(const CodeStream& stream, const BlockGrid& grid, const PaddingScalars& padding, double eb,
                       std::int32_t radius, std::span<float> out, int threads = 1);

/// Reconstructed d° field, same traversal as reconstruct_field.
QuantizedGrid reconstruct_quantized(const CodeStream& stream, const BlockGrid& grid, const PaddingScalars& padding,
                                    double eb, std::int32_t radius, int threads = 1);

}  // namespace vlz
