#include "vlz/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "vlz/compressor.hpp"
#include "vlz/dualquant.hpp"
#include "vlz/kernels.hpp"

namespace vlz {

namespace {

void check_lengths(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::input_size, "arrays differ in length (" + std::to_string(a.size()) + " vs " +
                                           std::to_string(b.size()) + ")");
  }
}

}  // namespace

double max_abs_error(std::span<const float> original, std::span<const float> reconstructed) {
  check_lengths(original, reconstructed);
  double m = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    m = std::max(m, std::fabs(static_cast<double>(original[i]) - static_cast<double>(reconstructed[i])));
  }
  return m;
}

double mean_squared_error(std::span<const float> original, std::span<const float> reconstructed) {
  check_lengths(original, reconstructed);
  if (original.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const double e = static_cast<double>(original[i]) - static_cast<double>(reconstructed[i]);
    sum += e * e;
  }
  return sum / static_cast<double>(original.size());
}

double psnr(std::span<const float> original, std::span<const float> reconstructed) {
  check_lengths(original, reconstructed);
  if (original.empty()) throw Error(ErrorCode::degenerate_range, "PSNR of an empty array");
  const auto [lo, hi] = std::minmax_element(original.begin(), original.end());
  const double range = static_cast<double>(*hi) - static_cast<double>(*lo);
  if (range == 0.0) throw Error(ErrorCode::degenerate_range, "PSNR undefined for a constant original");
  const double mse = mean_squared_error(original, reconstructed);
  if (mse == 0.0) return kPsnrIdentical;
  return 20.0 * std::log10(range) - 10.0 * std::log10(mse);
}

double bit_rate(std::size_t container_bytes, std::size_t element_count) {
  return 8.0 * static_cast<double>(container_bytes) / static_cast<double>(element_count);
}

double compression_ratio(std::size_t original_bytes, std::size_t container_bytes) {
  return static_cast<double>(original_bytes) / static_cast<double>(container_bytes);
}

OpCounters op_table(int ndims) {
  if (ndims < 1 || ndims > 3) throw Error(ErrorCode::config, "ndims must be 1, 2 or 3");
  OpCounters c;
  c.float_arith = 1;
  c.float_round = 1;
  c.float_cast = 1;
  c.float_compare = 2;
  c.int_lorenzo = ndims == 1 ? 0 : ndims == 2 ? 2 : 6;
  c.int_postquant = 3;
  return c;
}

OiBounds oi_bounds(const ArrayDescriptor& desc, int block_edge, double outlier_fraction) {
  const OpCounters t = op_table(desc.ndims());
  const BlockGrid grid(desc, block_edge);
  OiBounds b;
  b.conservative_flops = static_cast<double>(t.float_arith);
  b.lenient_flops = static_cast<double>(t.float_arith + t.float_round + t.float_cast + t.float_compare);
  b.bytes = 4.0 + 4.0 + 2.0 + 4.0 * outlier_fraction +
            4.0 * static_cast<double>(grid.block_count()) / static_cast<double>(desc.element_count());
  b.conservative = b.conservative_flops / b.bytes;
  b.lenient = b.lenient_flops / b.bytes;
  return b;
}

OpCounters count_kernel_ops(std::span<const float> data, const ArrayDescriptor& desc, const CompressionConfig& config) {
  config.validate();
  if (data.size() != desc.element_count()) throw Error(ErrorCode::input_size, "data length does not match descriptor");
  const double eb = resolve_error_bound(config.error_bound, data);
  OpCounters ops;
  QuantizedGrid field{desc, eb, std::vector<std::int32_t>(data.size())};
  if (kernels::prequantize_scalar_counted(data.data(), field.values.data(), data.size(), 2.0 * eb, ops) != data.size()) {
    prequantize(data, desc, eb);  // raises the precise error
  }
  const BlockGrid grid(desc, config.block_edge_for(desc.ndims()));
  const PaddingScalars padding = compute_padding(field, grid, config.padding);
  PaddedBlock tile(grid.ndims(), grid.block_edge());
  std::size_t tile_codes = 1;
  for (int d = 0; d < grid.ndims(); ++d) tile_codes *= static_cast<std::size_t>(grid.block_edge());
  std::vector<std::uint16_t> codes(tile_codes);
  for (std::size_t b = 0; b < grid.block_count(); ++b) {
    stage_block(field, grid, b, tile);
    apply_padding(padding, grid, b, tile);
    kernels::postquantize_scalar_counted(tile.tile().data(), tile.geometry(), config.radius, codes.data(), ops);
  }
  return ops;
}

OutlierReport outlier_report(const CodeStream& stream, const BlockGrid& grid) {
  OutlierReport r;
  const int nd = grid.ndims();
  for (std::size_t b = 0; b < grid.block_count(); ++b) {
    const auto e = grid.block_extents(b);
    const std::uint16_t* c = stream.codes.data() + grid.block_offset(b);
    std::size_t at = 0;
    for (int i = 0; i < e[0]; ++i) {
      for (int j = 0; j < e[1]; ++j) {
        for (int k = 0; k < e[2]; ++k, ++at) {
          if (c[at] != 0) continue;
          ++r.outliers;
          const bool border = i == 0 || (nd > 1 && j == 0) || (nd > 2 && k == 0);
          r.border_outliers += border;
        }
      }
    }
  }
  r.border_pct = r.outliers ? 100.0 * static_cast<double>(r.border_outliers) / static_cast<double>(r.outliers) : 0.0;
  return r;
}

std::vector<RdPoint> rate_distortion(std::span<const float> data, const ArrayDescriptor& desc,
                                     const CompressionConfig& config, std::span<const double> bounds) {
  std::vector<RdPoint> rows;
  for (const double value : bounds) {
    CompressionConfig c = config;
    c.error_bound.value = value;
    const Compressed comp = compress(data, desc, c);
    const Decompressed dec = decompress(comp.bytes, c.thread_count);
    const ContainerParts parts = deserialize(comp.bytes);
    const OutlierReport o = outlier_report(decode_stream(parts), BlockGrid(desc, comp.report.block_edge));
    RdPoint p;
    p.eb = comp.report.resolved_eb;
    p.rate_bits = comp.report.rate_bits;
    p.psnr_db = psnr(data, dec.data);
    p.outliers = o.outliers;
    p.outlier_border_pct = o.border_pct;
    p.container_bytes = comp.report.container_bytes;
    rows.push_back(p);
  }
  return rows;
}

void write_rd_csv(std::ostream& out, std::span<const RdPoint> rows) {
  out << "eb,rate_bits,psnr_db,outliers,outlier_border_pct\n";
  for (const auto& r : rows) {
    out << r.eb << ',' << r.rate_bits << ',' << r.psnr_db << ',' << r.outliers << ',' << r.outlier_border_pct << '\n';
  }
}

}  // namespace vlz
