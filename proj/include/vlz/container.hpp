#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vlz/huffman.hpp"
#include "vlz/padding.hpp"
#include "vlz/types.hpp"

namespace vlz {

inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr std::size_t kHeaderBytes = 148;

struct ContainerHeader {
  ArrayDescriptor descriptor;
  ErrorBound error_bound;
  double resolved_eb = 0.0;
  int block_edge = 0;
  int lane_width = 1;
  PaddingPolicy padding{};
  std::int32_t radius = kDefaultRadius;
  bool tuned = false;  // block_edge / lane_width came from autotuning

  friend bool operator==(const ContainerHeader&, const ContainerHeader&) = default;
};

/// Element whose fp32 reconstruction from d° would miss the bound; stored verbatim.
struct Patch {
  std::uint64_t index;
  std::uint32_t bits;

  friend bool operator==(const Patch&, const Patch&) = default;
};

struct ContainerParts {
  ContainerHeader header;
  std::vector<std::int64_t> padding;  // policy lives in the header
  HuffmanCodebook codebook;
  std::uint64_t symbol_count = 0;
  BitStream bits;
  std::vector<std::uint32_t> block_outlier_counts;
  std::vector<std::int32_t> outliers;
  std::vector<Patch> patches;

  friend bool operator==(const ContainerParts&, const ContainerParts&) = default;
};

/// Byte layout (all integers little-endian):
///   0   magic "VLZ1"            4   version u32           8   flags u32 (must be 0)
///   12  ndims u32               16  dims u64[3]           40  element_count u64
///   48  eb_mode u32             52  block_edge u32        56  eb_value f64
///   64  resolved_eb f64         72  radius u32            76  lane_width u32
///   80  padding value u32       84  padding granularity   88  tuned u32
///   92  reserved u32            96  section offsets u64[6]: padding, codebook, codes,
///                                   outliers, patches, payload end
///   144 header CRC32 over [0, 144)
/// Sections follow contiguously, then a CRC32 of [148, payload end). Counts are LEB128
/// varints; padding scalars are zigzag varints of the difference to the previous scalar.
///   padding   count, scalars (delta)
///   codebook  count, (symbol gap to previous symbol + 1, length u8) ascending by symbol
///   codes     symbol_count u64, bit_length u64, ceil(bit_length / 8) bytes MSB-first
///   outliers  block count, per-block counts, d° values i32
///   patches   count, (index gap to previous index + 1, fp32 bits u32)
std::vector<std::uint8_t> serialize(const ContainerParts& parts);

/// Validates magic, version, header CRC, flags, header fields, offsets and payload CRC
/// before decoding sections. Every failure is a FormatError with a distinct kind.
ContainerParts deserialize(std::span<const std::uint8_t> bytes);

/// Header only; performs the same header-level checks as deserialize.
ContainerHeader read_header(std::span<const std::uint8_t> bytes);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace vlz
