#include <algorithm>
#include <cmath>
#include <string>

#include "vlz/types.hpp"

namespace vlz {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
    case ErrorCode::input_size: return "input_size";
    case ErrorCode::degenerate_range: return "degenerate_range";
    case ErrorCode::bound_too_small: return "bound_too_small";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::format: return "format";
    case ErrorCode::corrupt_stream: return "corrupt_stream";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

const char* to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::truncated: return "truncated";
    case FormatErrorKind::bad_magic: return "bad_magic";
    case FormatErrorKind::unsupported_version: return "unsupported_version";
    case FormatErrorKind::unsupported_flags: return "unsupported_flags";
    case FormatErrorKind::header_crc_mismatch: return "header_crc_mismatch";
    case FormatErrorKind::payload_crc_mismatch: return "payload_crc_mismatch";
    case FormatErrorKind::bad_offsets: return "bad_offsets";
    case FormatErrorKind::bad_header: return "bad_header";
    case FormatErrorKind::bad_codebook: return "bad_codebook";
    case FormatErrorKind::bad_section: return "bad_section";
  }
  return "unknown";
}

ArrayDescriptor::ArrayDescriptor(std::span<const std::size_t> dims) {
  if (dims.empty() || dims.size() > 3) {
    throw Error(ErrorCode::config, "array must have 1 to 3 dimensions, got " + std::to_string(dims.size()));
  }
  ndims_ = static_cast<int>(dims.size());
  count_ = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == 0) throw Error(ErrorCode::config, "array extents must be >= 1");
    dims_[i] = dims[i];
    count_ *= dims[i];
  }
}

ArrayDescriptor::ArrayDescriptor(std::initializer_list<std::size_t> dims)
    : ArrayDescriptor(std::span<const std::size_t>(dims.begin(), dims.size())) {}

double resolve_error_bound(const ErrorBound& eb, std::span<const float> data) {
  if (!(eb.value > 0.0) || !std::isfinite(eb.value)) {
    throw Error(ErrorCode::config, "error bound must be a positive finite number");
  }
  if (eb.mode == ErrorBoundMode::absolute) return eb.value;
  if (data.empty()) throw Error(ErrorCode::config, "relative error bound needs non-empty data");
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  const double range = static_cast<double>(*hi) - static_cast<double>(*lo);
  if (!std::isfinite(range)) throw Error(ErrorCode::non_finite, "data range is not finite");
  if (range == 0.0) {
    throw Error(ErrorCode::degenerate_range, "value-range relative bound on constant data resolves to 0");
  }
  return eb.value * range;
}

bool is_valid_block_edge(int edge) noexcept {
  return std::find(kBlockEdges.begin(), kBlockEdges.end(), edge) != kBlockEdges.end();
}

bool is_valid_lane_width(int lanes) noexcept {
  return std::find(kLaneWidths.begin(), kLaneWidths.end(), lanes) != kLaneWidths.end();
}

int default_block_edge(int ndims) noexcept {
  switch (ndims) {
    case 1: return 64;
    case 2: return 16;
    default: return 8;
  }
}

void CompressionConfig::validate() const {
  if (!(error_bound.value > 0.0) || !std::isfinite(error_bound.value)) {
    throw Error(ErrorCode::config, "error bound must be a positive finite number");
  }
  if (block_edge != 0 && !is_valid_block_edge(block_edge)) {
    throw Error(ErrorCode::config, "block edge must be one of 8, 16, 32, 64 (got " + std::to_string(block_edge) + ")");
  }
  if (!is_valid_lane_width(lane_width)) {
    throw Error(ErrorCode::config, "lane width must be one of 1, 4, 8, 16 (got " + std::to_string(lane_width) + ")");
  }
  if (radius < 2 || radius > kMaxRadius) {
    throw Error(ErrorCode::config, "quantizer radius must be in [2, 32768] (got " + std::to_string(radius) + ")");
  }
  if (thread_count < 1) throw Error(ErrorCode::config, "thread count must be positive");
}

}  // namespace vlz
