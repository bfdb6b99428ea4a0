#pragma once

#include <stdexcept>
#include <string>

namespace vlz {

enum class ErrorCode {
  config,            // invalid configuration or flags
  io,                // file could not be read or written
  input_size,        // input byte count does not match the declared dims
  degenerate_range,  // value-range relative bound over constant data, PSNR of constant data
  bound_too_small,   // pre-quantized magnitude would overflow int32
  non_finite,        // NaN or infinity in the input
  format,            // container structure violation
  corrupt_stream,    // entropy-coded or code-stream payload inconsistent
  internal,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class FormatErrorKind {
  truncated,
  bad_magic,
  unsupported_version,
  unsupported_flags,
  header_crc_mismatch,
  payload_crc_mismatch,
  bad_offsets,
  bad_header,
  bad_codebook,
  bad_section,
};

const char* to_string(FormatErrorKind kind);

class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, const std::string& detail)
      : Error(ErrorCode::format, std::string("format error [") + to_string(kind) + "]: " + detail), kind_(kind) {}
  FormatErrorKind kind() const noexcept { return kind_; }

 private:
  FormatErrorKind kind_;
};

}  // namespace vlz
