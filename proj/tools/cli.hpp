#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vlz/autotune.hpp"
#include "vlz/error.hpp"
#include "vlz/types.hpp"

namespace vlz::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_config = 2,
  exit_io = 3,
  exit_input_size = 4,
  exit_data = 5,  // degenerate range, bound too small, non-finite input
  exit_format = 6,
  exit_corrupt = 7,
  exit_verify_failed = 8,
  exit_internal = 70,
};

int exit_code_for(ErrorCode code) noexcept;

/// Runs one command line; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Up to 3 dims pass through; with `fold`, leading dims of a longer list are multiplied
/// into the first so the result is 3D.
ArrayDescriptor make_descriptor(const std::vector<std::size_t>& dims, bool fold);

/// "kind[:granularity]" with kind in zero|min|max|mean, granularity in global|block|edge.
PaddingPolicy parse_padding(const std::string& text);
std::string format_padding(const PaddingPolicy& policy);

/// "fraction,iterations[,seed]".
AutotuneSettings parse_autotune(const std::string& text);

std::vector<float> read_raw(const std::filesystem::path& path, const ArrayDescriptor& desc);
void write_raw(const std::filesystem::path& path, const std::vector<float>& data);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace vlz::cli
