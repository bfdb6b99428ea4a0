#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "vlz/types.hpp"

namespace vlz {

struct TuneConfig {
  int block_edge = 0;
  int lanes = 0;  // effective lane width

  friend auto operator<=>(const TuneConfig&, const TuneConfig&) = default;
};

/// Ordered, deduplicated (block_edge, lanes) candidates.
class TuneSpace {
 public:
  TuneSpace() = default;

  /// Cross product with lanes clamped to the block edge; duplicates collapse. Throws
  /// config for invalid edges/lanes or an empty result.
  static TuneSpace make(std::span<const int> block_edges, std::span<const int> lane_widths);
  /// All block edges x lane widths the CPU runs natively (portable 4 when none).
  static TuneSpace full();
  static TuneSpace of(std::vector<TuneConfig> configs);

  std::span<const TuneConfig> configs() const noexcept { return configs_; }
  std::size_t size() const noexcept { return configs_.size(); }
  bool contains(const TuneConfig& c) const noexcept;
  int max_block_edge() const noexcept;

 private:
  std::vector<TuneConfig> configs_;
};

struct AutotuneSettings {
  double fraction = 0.10;
  int iterations = 3;
  std::uint64_t seed = 1;
};

/// Measures one run of `work` for `config`, in seconds.
using TuneTimer = std::function<double(const TuneConfig& config, const std::function<void()>& work)>;
TuneTimer wall_clock_timer();

struct TuneMeasurement {
  TuneConfig config;
  std::vector<double> seconds;
  double mean = 0.0;
  double stddev = 0.0;
};

struct TuneReport {
  std::vector<TuneMeasurement> measurements;  // space order
  TuneConfig chosen;
  double sample_fraction = 0.0;
  int iterations = 0;
  std::size_t sampled_blocks = 0;
  double tuning_seconds = 0.0;
  double tuning_runtime_fraction = 0.0;  // tuning / (tuning + compression), set by the caller
};

/// ceil(fraction * block_count) distinct block indices (at least one), ascending, drawn
/// uniformly without replacement with a seeded generator.
std::vector<std::size_t> sample_blocks(const BlockGrid& grid, double fraction, std::uint64_t seed);

/// Times the dual-quant kernel of every configuration on a common sample. Samples are
/// blocks of the largest edge in the space; each configuration processes the sub-blocks
/// inside them, so every configuration touches the same data. Samples form the outer
/// loop, configurations the inner one. Argmin of mean time wins; exact ties go to the
/// larger block edge, then the larger lane width.
TuneReport autotune(std::span<const float> data, const ArrayDescriptor& desc, double eb, std::int32_t radius,
                    const TuneSpace& space, const AutotuneSettings& settings, const TuneTimer& timer);
TuneReport autotune(std::span<const float> data, const ArrayDescriptor& desc, double eb, std::int32_t radius,
                    const TuneSpace& space, const AutotuneSettings& settings);

/// Selection rule used by autotune, exposed for reuse.
TuneConfig choose_config(std::span<const TuneMeasurement> measurements);

/// The k most frequently chosen configurations of earlier runs (ties by space order).
/// An empty history yields the full space.
TuneSpace narrowed_autotune(std::span<const TuneConfig> history, const TuneSpace& full, std::size_t k = 2);
TuneSpace narrowed_autotune(std::span<const TuneReport> history, const TuneSpace& full, std::size_t k = 2);

/// block,lanes,mean_s,stddev_s,chosen
void write_tune_csv(std::ostream& out, const TuneReport& report);

}  // namespace vlz
