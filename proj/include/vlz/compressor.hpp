#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vlz/autotune.hpp"
#include "vlz/container.hpp"
#include "vlz/kernels.hpp"
#include "vlz/types.hpp"

namespace vlz {

struct CompressionReport {
  std::size_t element_count = 0;
  std::size_t original_bytes = 0;
  std::size_t container_bytes = 0;
  double ratio = 0.0;
  double rate_bits = 0.0;
  std::size_t outliers = 0;
  std::size_t patches = 0;
  double resolved_eb = 0.0;
  int block_edge = 0;
  int lane_width = 1;
  KernelBackend backend = KernelBackend::scalar;
  double dualquant_seconds = 0.0;
  double encode_seconds = 0.0;
  double total_seconds = 0.0;
  std::optional<TuneReport> tune;
};

struct Compressed {
  std::vector<std::uint8_t> bytes;
  CompressionReport report;
};

struct CompressOptions {
  CompressionConfig config;
  /// When set, (block_edge, lane_width) come from autotuning over `space`.
  std::optional<AutotuneSettings> autotune;
  std::optional<TuneSpace> space;
};

/// Full pipeline: resolve eb, dual-quant, entropy-code, serialize. Output bytes depend
/// only on the data and the (possibly tuned) configuration, never on thread count.
Compressed compress(std::span<const float> data, const ArrayDescriptor& desc, const CompressOptions& options);
Compressed compress(std::span<const float> data, const ArrayDescriptor& desc, const CompressionConfig& config);

/// Elements whose fp32 reconstruction either misses the bound or would not pre-quantize
/// back to the same d°; their original bits are stored so the bound and idempotence hold.
std::vector<Patch> find_patches(std::span<const float> data, const QuantizedGrid& field, int threads = 1);

/// Entropy-coded stream plus padding, ready for serialize().
ContainerParts assemble(const ContainerHeader& header, const PaddingScalars& padding, const CodeStream& stream,
                        std::vector<Patch> patches);

/// Decoded code stream and padding of a parsed container.
CodeStream decode_stream(const ContainerParts& parts);

struct Decompressed {
  ContainerHeader header;
  std::vector<float> data;
};

Decompressed decompress(std::span<const std::uint8_t> bytes, int threads = 1);

}  // namespace vlz
