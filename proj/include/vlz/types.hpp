#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "vlz/error.hpp"

namespace vlz {

/// Shape of an fp32 grid. Row-major, last dimension fastest-varying.
class ArrayDescriptor {
 public:
  ArrayDescriptor() = default;
  explicit ArrayDescriptor(std::span<const std::size_t> dims);
  ArrayDescriptor(std::initializer_list<std::size_t> dims);

  int ndims() const noexcept { return ndims_; }
  std::span<const std::size_t> dims() const noexcept { return {dims_.data(), static_cast<std::size_t>(ndims_)}; }
  std::size_t extent(int d) const { return dims_.at(static_cast<std::size_t>(d)); }
  std::size_t element_count() const noexcept { return count_; }
  std::size_t byte_count() const noexcept { return count_ * sizeof(float); }

  friend bool operator==(const ArrayDescriptor&, const ArrayDescriptor&) = default;

 private:
  int ndims_ = 0;
  std::array<std::size_t, 3> dims_{0, 0, 0};
  std::size_t count_ = 0;
};

enum class ErrorBoundMode : std::uint32_t { absolute = 0, value_range_relative = 1 };

struct ErrorBound {
  ErrorBoundMode mode = ErrorBoundMode::absolute;
  double value = 1e-4;

  static ErrorBound absolute(double v) { return {ErrorBoundMode::absolute, v}; }
  static ErrorBound relative(double v) { return {ErrorBoundMode::value_range_relative, v}; }

  friend bool operator==(const ErrorBound&, const ErrorBound&) = default;
};

/// Resolves the absolute bound eb. Relative mode scales by max(D) - min(D).
double resolve_error_bound(const ErrorBound& eb, std::span<const float> data);

inline constexpr std::array<int, 4> kBlockEdges{8, 16, 32, 64};
inline constexpr std::array<int, 4> kLaneWidths{1, 4, 8, 16};
inline constexpr std::int32_t kDefaultRadius = 32768;
inline constexpr std::int32_t kMaxRadius = 32768;  // codes are stored as uint16

bool is_valid_block_edge(int edge) noexcept;
bool is_valid_lane_width(int lanes) noexcept;

/// Default block edge when the caller does not choose one.
int default_block_edge(int ndims) noexcept;

/// A lane never spans more than one block row.
constexpr int effective_lane_width(int lanes, int block_edge) noexcept {
  return lanes < block_edge ? lanes : block_edge;
}

enum class PaddingValue : std::uint32_t { zero = 0, minimum = 1, maximum = 2, mean = 3 };
enum class PaddingGranularity : std::uint32_t { global = 0, block = 1, edge = 2 };

struct PaddingPolicy {
  PaddingValue value = PaddingValue::mean;
  PaddingGranularity granularity = PaddingGranularity::global;

  friend bool operator==(const PaddingPolicy&, const PaddingPolicy&) = default;
};

struct CompressionConfig {
  ErrorBound error_bound{};
  int block_edge = 0;  // 0 picks default_block_edge(ndims)
  int lane_width = 1;
  PaddingPolicy padding{};
  std::int32_t radius = kDefaultRadius;
  int thread_count = 1;

  /// Throws ErrorCode::config on any invalid field.
  void validate() const;
  int block_edge_for(int ndims) const noexcept { return block_edge == 0 ? default_block_edge(ndims) : block_edge; }
};

/// Block decomposition of an array. Blocks are traversed in row-major block-index order.
class BlockGrid {
 public:
  BlockGrid(const ArrayDescriptor& desc, int block_edge);

  const ArrayDescriptor& descriptor() const noexcept { return desc_; }
  int block_edge() const noexcept { return edge_; }
  int ndims() const noexcept { return desc_.ndims(); }
  std::span<const std::size_t> blocks_per_dim() const noexcept {
    return {blocks_per_dim_.data(), static_cast<std::size_t>(desc_.ndims())};
  }
  std::size_t block_count() const noexcept { return block_count_; }

  std::array<std::size_t, 3> block_coords(std::size_t block) const;
  std::array<std::size_t, 3> block_origin(std::size_t block) const;
  /// True per-dimension extents; partial on the high boundary.
  std::array<int, 3> block_extents(std::size_t block) const;
  std::size_t block_elements(std::size_t block) const;
  /// Index of the block's first element in the canonical code stream.
  std::size_t block_offset(std::size_t block) const { return offsets_.at(block); }

 private:
  ArrayDescriptor desc_;
  int edge_;
  std::array<std::size_t, 3> blocks_per_dim_{1, 1, 1};
  std::size_t block_count_ = 0;
  std::vector<std::size_t> offsets_;
};

BlockGrid build_block_grid(const ArrayDescriptor& desc, int block_edge);

/// Pre-quantized field d° = round(d / 2eb).
struct QuantizedGrid {
  ArrayDescriptor descriptor;
  double resolved_eb = 0.0;
  std::vector<std::int32_t> values;
};

/// Per-element quantization codes in canonical order. Code 0 marks an outlier whose
/// d° is stored, in order, in `outliers`; block_outlier_counts partitions that list.
struct CodeStream {
  std::vector<std::uint16_t> codes;
  std::vector<std::int32_t> outliers;
  std::vector<std::uint32_t> block_outlier_counts;

  friend bool operator==(const CodeStream&, const CodeStream&) = default;
};

}  // namespace vlz
