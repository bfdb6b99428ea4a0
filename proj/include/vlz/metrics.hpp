#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "vlz/kernel_abi.hpp"
#include "vlz/types.hpp"

namespace vlz {

/// max |a - b| in fp64. Throws input_size on a length mismatch.
double max_abs_error(std::span<const float> original, std::span<const float> reconstructed);
double mean_squared_error(std::span<const float> original, std::span<const float> reconstructed);

inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 20 log10(range) - 10 log10(MSE); +inf when identical. Throws degenerate_range for a
/// constant original.
double psnr(std::span<const float> original, std::span<const float> reconstructed);

double bit_rate(std::size_t container_bytes, std::size_t element_count);
double compression_ratio(std::size_t original_bytes, std::size_t container_bytes);

/// Per-element operation counts of the dual-quant kernel, by dimensionality:
///
///   ndims  float_arith  float_round  float_cast  float_compare  int_lorenzo  int_postquant
///   1      1            1            1           2              0            3
///   2      1            1            1           2              2            3
///   3      1            1            1           2              6            3
///
/// float_arith is the division by 2eb. The two compares are the overflow guard. Lorenzo
/// and post-quantization work is integer and excluded from both float bounds.
OpCounters op_table(int ndims);

struct OiBounds {
  double conservative_flops = 0.0;  // per element
  double lenient_flops = 0.0;       // per element
  double bytes = 0.0;               // per element
  double conservative = 0.0;        // flops per byte
  double lenient = 0.0;
};

/// Bytes per element: 4 (read d) + 4 (write d°) + 2 (write code) + 4 per outlier value
/// + 4 per block for its outlier count.
OiBounds oi_bounds(const ArrayDescriptor& desc, int block_edge, double outlier_fraction = 0.0);

/// Attainable GFLOP/s for an operational intensity under a bandwidth ceiling in GB/s.
inline double roofline_gflops(double intensity, double peak_gbps) { return intensity * peak_gbps; }

/// Runs the instrumented scalar kernel over the whole field (prequant + every block's
/// post-quant) and returns the summed counters.
OpCounters count_kernel_ops(std::span<const float> data, const ArrayDescriptor& desc, const CompressionConfig& config);

struct OutlierReport {
  std::size_t outliers = 0;
  std::size_t border_outliers = 0;  // outliers with some in-block coordinate equal to 0
  double border_pct = 0.0;          // border_outliers / outliers * 100 (0 when none)
};

OutlierReport outlier_report(const CodeStream& stream, const BlockGrid& grid);

struct RdPoint {
  double eb = 0.0;  // resolved absolute bound
  double rate_bits = 0.0;
  double psnr_db = 0.0;
  std::size_t outliers = 0;
  double outlier_border_pct = 0.0;
  std::size_t container_bytes = 0;
};

/// Compresses and decompresses once per bound; config.error_bound is replaced by each
/// entry of `bounds` using its mode.
std::vector<RdPoint> rate_distortion(std::span<const float> data, const ArrayDescriptor& desc,
                                     const CompressionConfig& config, std::span<const double> bounds);

/// eb,rate_bits,psnr_db,outliers,outlier_border_pct
void write_rd_csv(std::ostream& out, std::span<const RdPoint> rows);

}  // namespace vlz
