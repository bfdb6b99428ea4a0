#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vlz/autotune.hpp"
#include "vlz/kernels.hpp"
#include "vlz/types.hpp"

namespace vlz {

inline constexpr int kMinRepetitions = 3;

struct BenchRow {
  std::string dataset;
  std::string dims;  // "512x512x512"
  double eb = 0.0;
  int block = 0;
  int lanes = 1;
  int threads = 1;
  double time_ms = 0.0;  // median
  double stddev_ms = 0.0;
  double mbps = 0.0;
  double gflops_conservative = 0.0;
  double gflops_lenient = 0.0;
  KernelBackend backend = KernelBackend::scalar;
};

/// Times the dual-quant stage (pre-quant, padding, post-quant) `repetitions` times with
/// a monotonic clock. Throws config when repetitions < 3.
BenchRow bench_kernel(std::span<const float> data, const ArrayDescriptor& desc, const CompressionConfig& config,
                      int repetitions, const std::string& dataset = "data");

/// Every block edge x lane width (lanes clamped and deduplicated), scalar included.
std::vector<BenchRow> bench_sweep(std::span<const float> data, const ArrayDescriptor& desc,
                                  const CompressionConfig& config, std::span<const int> block_edges,
                                  std::span<const int> lane_widths, int repetitions, const std::string& dataset);

inline constexpr int kBenchColumns = 10;

/// dataset,dims,eb,block,lanes,threads,time_ms,MBps,gflops_cons,gflops_len
void write_bench_header(std::ostream& out);
void write_bench_row(std::ostream& out, const BenchRow& row);

struct StudyRow {
  double fraction = 0.0;
  int iterations = 0;
  TuneConfig chosen;
  double pct_of_peak = 0.0;         // best full-field time / chosen config's full-field time
  double pct_runtime_tuning = 0.0;  // tuning / (tuning + chosen full-field time)
  double tuning_s = 0.0;
};

/// Full-field time of each config is measured first; then autotune runs for every
/// (fraction, iterations) pair.
std::vector<StudyRow> autotune_study(std::span<const float> data, const ArrayDescriptor& desc, double eb,
                                     std::int32_t radius, const TuneSpace& space, std::span<const double> fractions,
                                     std::span<const int> iterations, std::uint64_t seed, int repetitions);

/// fraction,iterations,block,lanes,pct_of_peak,pct_runtime_tuning,tuning_s
void write_study_csv(std::ostream& out, std::span<const StudyRow> rows);

/// Smooth deterministic test field: sums of low-frequency sines plus offset.
std::vector<float> synthetic_field(const ArrayDescriptor& desc, std::uint64_t seed = 1);

}  // namespace vlz
