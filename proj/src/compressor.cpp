#include "vlz/compressor.hpp"

#include <omp.h>

#include <bit>
#include <chrono>
#include <cmath>

#include "vlz/dualquant.hpp"
#include "vlz/huffman.hpp"
#include "vlz/reconstruct.hpp"

namespace vlz {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<Patch> find_patches(std::span<const float> data, const QuantizedGrid& field, int threads) {
  const double eb = field.resolved_eb;
  const double two_eb = 2.0 * eb;
  const auto n = static_cast<std::ptrdiff_t>(data.size());
  std::vector<std::vector<Patch>> per_thread;
#pragma omp parallel num_threads(threads)
  {
#pragma omp single
    per_thread.resize(static_cast<std::size_t>(omp_get_num_threads()));
    auto& mine = per_thread[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const std::int32_t dq = field.values[u];
      const float r = reconstruct_value(dq, eb);
      const bool within = std::fabs(static_cast<double>(data[u]) - static_cast<double>(r)) <= eb;
      const bool stable = std::round(static_cast<double>(r) / two_eb) == static_cast<double>(dq);
      if (!(within && stable)) mine.push_back({static_cast<std::uint64_t>(u), std::bit_cast<std::uint32_t>(data[u])});
    }
  }
  // Static schedule hands out ascending index ranges in thread order.
  std::vector<Patch> out;
  for (const auto& v : per_thread) out.insert(out.end(), v.begin(), v.end());
  return out;
}

ContainerParts assemble(const ContainerHeader& header, const PaddingScalars& padding, const CodeStream& stream,
                        std::vector<Patch> patches) {
  ContainerParts parts;
  parts.header = header;
  parts.padding = padding.scalars;
  parts.codebook = build_codebook(stream.codes);
  parts.symbol_count = stream.codes.size();
  parts.bits = encode(stream.codes, parts.codebook);
  parts.block_outlier_counts = stream.block_outlier_counts;
  parts.outliers = stream.outliers;
  parts.patches = std::move(patches);
  return parts;
}

Compressed compress(std::span<const float> data, const ArrayDescriptor& desc, const CompressOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  CompressionConfig config = options.config;
  config.validate();
  if (data.size() != desc.element_count()) {
    throw Error(ErrorCode::input_size, "data length " + std::to_string(data.size()) + " does not match descriptor (" +
                                           std::to_string(desc.element_count()) + ")");
  }
  const double eb = resolve_error_bound(config.error_bound, data);

  Compressed out;
  auto& rep = out.report;
  if (options.autotune) {
    const TuneSpace space = options.space ? *options.space : TuneSpace::full();
    TuneReport tune = autotune(data, desc, eb, config.radius, space, *options.autotune);
    config.block_edge = tune.chosen.block_edge;
    config.lane_width = tune.chosen.lanes;
    rep.tune = std::move(tune);
  }
  const int edge = config.block_edge_for(desc.ndims());
  const LaneKernel kernel = select_kernel(effective_lane_width(config.lane_width, edge));

  const auto t1 = std::chrono::steady_clock::now();
  const DualQuantResult dq = run_dualquant(data, desc, config, eb, kernel);
  rep.dualquant_seconds = seconds_since(t1);

  const auto t2 = std::chrono::steady_clock::now();
  ContainerHeader header;
  header.descriptor = desc;
  header.error_bound = config.error_bound;
  header.resolved_eb = eb;
  header.block_edge = edge;
  header.lane_width = config.lane_width;
  header.padding = config.padding;
  header.radius = config.radius;
  header.tuned = options.autotune.has_value();
  auto patches = find_patches(data, dq.field, config.thread_count);
  rep.patches = patches.size();
  out.bytes = serialize(assemble(header, dq.padding, dq.stream, std::move(patches)));
  rep.encode_seconds = seconds_since(t2);

  rep.element_count = desc.element_count();
  rep.original_bytes = desc.byte_count();
  rep.container_bytes = out.bytes.size();
  rep.ratio = static_cast<double>(rep.original_bytes) / static_cast<double>(rep.container_bytes);
  rep.rate_bits = 8.0 * static_cast<double>(rep.container_bytes) / static_cast<double>(rep.element_count);
  rep.outliers = dq.stream.outliers.size();
  rep.resolved_eb = eb;
  rep.block_edge = edge;
  rep.lane_width = config.lane_width;
  rep.backend = kernel.backend;
  rep.total_seconds = seconds_since(t0);
  if (rep.tune) rep.tune->tuning_runtime_fraction = rep.tune->tuning_seconds / rep.total_seconds;
  return out;
}

Compressed compress(std::span<const float> data, const ArrayDescriptor& desc, const CompressionConfig& config) {
  CompressOptions options;
  options.config = config;
  return compress(data, desc, options);
}

CodeStream decode_stream(const ContainerParts& parts) {
  CodeStream s;
  s.codes = decode(parts.bits.bytes, parts.bits.bit_length, parts.codebook, static_cast<std::size_t>(parts.symbol_count));
  s.outliers = parts.outliers;
  s.block_outlier_counts = parts.block_outlier_counts;
  return s;
}

Decompressed decompress(std::span<const std::uint8_t> bytes, int threads) {
  if (threads < 1) throw Error(ErrorCode::config, "thread count must be >= 1");
  const ContainerParts parts = deserialize(bytes);
  const auto& h = parts.header;
  const BlockGrid grid(h.descriptor, h.block_edge);
  const CodeStream stream = decode_stream(parts);
  Decompressed out;
  out.header = h;
  out.data.resize(h.descriptor.element_count());
  reconstruct_field(stream, grid, PaddingScalars{h.padding, parts.padding}, h.resolved_eb, h.radius, out.data, threads);
  for (const auto& p : parts.patches) out.data[static_cast<std::size_t>(p.index)] = std::bit_cast<float>(p.bits);
  return out;
}

}  // namespace vlz
