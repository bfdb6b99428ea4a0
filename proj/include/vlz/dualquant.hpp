#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vlz/kernels.hpp"
#include "vlz/padding.hpp"
#include "vlz/types.hpp"

namespace vlz {

/// A block staged with its low-index halo (see TileGeometry for the layout).
class PaddedBlock {
 public:
  PaddedBlock(int ndims, int edge);

  int ndims() const noexcept { return ndims_; }
  int edge() const noexcept { return edge_; }
  const std::array<int, 3>& extents() const noexcept { return extents_; }
  void set_extents(const std::array<int, 3>& extents) noexcept { extents_ = extents; }

  TileGeometry geometry() const noexcept;
  std::span<std::int32_t> tile() noexcept { return tile_; }
  std::span<const std::int32_t> tile() const noexcept { return tile_; }

  /// In-block coordinates; -1 addresses the halo. Unused trailing coordinates are 0.
  std::int32_t& at(const std::array<int, 3>& c) noexcept { return tile_[index(c)]; }
  std::int32_t at(const std::array<int, 3>& c) const noexcept { return tile_[index(c)]; }
  std::size_t index(const std::array<int, 3>& c) const noexcept;

 private:
  int ndims_;
  int edge_;
  std::array<int, 3> extents_{1, 1, 1};
  std::vector<std::int32_t> tile_;
};

/// First-order Lorenzo stencil over preceding neighbours, in mod-2^32 arithmetic.
std::int32_t lorenzo_predict(const std::int32_t* tile, const TileGeometry& geom, const std::array<int, 3>& c) noexcept;
std::int32_t lorenzo_predict(const PaddedBlock& block, const std::array<int, 3>& c) noexcept;

/// Code for the delta d° - p: delta + radius when |delta| <= radius - 1, else 0 (outlier).
inline std::uint16_t quantize_delta(std::int32_t dq, std::int32_t pred, std::int32_t radius) noexcept {
  const std::uint32_t delta = static_cast<std::uint32_t>(dq) - static_cast<std::uint32_t>(pred);
  const std::uint32_t span = static_cast<std::uint32_t>(radius - 1);
  return (delta + span) <= 2 * span ? static_cast<std::uint16_t>(delta + static_cast<std::uint32_t>(radius)) : 0;
}

/// d° -> reconstructed value. Shared by the compressor (patch detection) and decompressor.
inline float reconstruct_value(std::int32_t dq, double eb) noexcept {
  return static_cast<float>(2.0 * static_cast<double>(dq) * eb);
}

/// Scalar pre-quantization of one value. Throws bound_too_small / non_finite.
std::int32_t prequantize_value(float d, double eb);

/// Pre-quantizes a whole array with the given kernel. Errors name the lowest offending index.
QuantizedGrid prequantize(std::span<const float> data, const ArrayDescriptor& desc, double eb,
                          const LaneKernel& kernel, int threads = 1);
QuantizedGrid prequantize(std::span<const float> data, const ArrayDescriptor& desc, double eb);

struct BlockCodes {
  std::vector<std::uint16_t> codes;    // in-bounds elements, row-major
  std::vector<std::int32_t> outliers;  // d° of sentinel elements, in order
};

/// Post-quantizes one staged block with the scalar reference.
BlockCodes postquantize(const PaddedBlock& block, std::int32_t radius);
BlockCodes postquantize(const PaddedBlock& block, std::int32_t radius, const LaneKernel& kernel);

/// Copies a block's d° values into a tile, replicating the last value of each row across
/// out-of-bounds columns so whole lanes only read initialised memory.
void stage_block(const QuantizedGrid& field, const BlockGrid& grid, std::size_t block, PaddedBlock& tile);

struct DualQuantResult {
  QuantizedGrid field;
  PaddingScalars padding;
  CodeStream stream;
};

/// Complete compression-side pipeline: pre-quantize, compute padding, post-quantize
/// every block in parallel. Output is independent of kernel and thread count.
DualQuantResult run_dualquant(std::span<const float> data, const ArrayDescriptor& desc,
                              const CompressionConfig& config, double resolved_eb, const LaneKernel& kernel);

/// Post-quantization of every block of an already pre-quantized field.
CodeStream postquantize_field(const QuantizedGrid& field, const BlockGrid& grid, const PaddingScalars& padding,
                              std::int32_t radius, const LaneKernel& kernel, int threads);

CodeStream dualquant_scalar(std::span<const float> data, const ArrayDescriptor& desc, const CompressionConfig& config);
/// Requires lane_width in {4, 8, 16}; byte-identical to dualquant_scalar.
CodeStream dualquant_vector(std::span<const float> data, const ArrayDescriptor& desc, const CompressionConfig& config);

/// Reusable scratch for running the fused block kernel on a subset of blocks.
class BlockWorkspace {
 public:
  BlockWorkspace(int ndims, int edge);
  PaddedBlock& tile() noexcept { return tile_; }
  std::span<std::uint16_t> codes() noexcept { return codes_; }

 private:
  PaddedBlock tile_;
  std::vector<std::uint16_t> codes_;
};

/// Pre- and post-quantizes the listed blocks straight from the float input with zero
/// halo, discarding the output. Returns the number of outliers seen. Used for timing.
std::size_t dualquant_blocks(std::span<const float> data, const BlockGrid& grid, std::span<const std::size_t> blocks,
                             double eb, std::int32_t radius, const LaneKernel& kernel, BlockWorkspace& workspace);

}  // namespace vlz
