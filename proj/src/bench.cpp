#include "vlz/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>

#include "vlz/dualquant.hpp"
#include "vlz/metrics.hpp"

namespace vlz {

namespace {

std::string dims_string(const ArrayDescriptor& desc) {
  std::string s;
  for (int d = 0; d < desc.ndims(); ++d) {
    if (d) s += 'x';
    s += std::to_string(desc.extent(d));
  }
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Kernel time per repetition, seconds.
std::vector<double> time_dualquant(std::span<const float> data, const ArrayDescriptor& desc,
                                   const CompressionConfig& config, double eb, const LaneKernel& kernel, int reps) {
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = run_dualquant(data, desc, config, eb, kernel);
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return t;
}

}  // namespace

BenchRow bench_kernel(std::span<const float> data, const ArrayDescriptor& desc, const CompressionConfig& config,
                      int repetitions, const std::string& dataset) {
  if (repetitions < kMinRepetitions) {
    throw Error(ErrorCode::config, "benchmark needs at least " + std::to_string(kMinRepetitions) + " repetitions");
  }
  config.validate();
  const double eb = resolve_error_bound(config.error_bound, data);
  const int edge = config.block_edge_for(desc.ndims());
  const LaneKernel kernel = select_kernel(effective_lane_width(config.lane_width, edge));
  const auto times = time_dualquant(data, desc, config, eb, kernel, repetitions);

  BenchRow row;
  row.dataset = dataset;
  row.dims = dims_string(desc);
  row.eb = eb;
  row.block = edge;
  row.lanes = kernel.lanes;
  row.threads = config.thread_count;
  row.backend = kernel.backend;
  const double sec = median(times);
  row.time_ms = 1e3 * sec;
  row.stddev_ms = 1e3 * stddev(times);
  const double n = static_cast<double>(desc.element_count());
  row.mbps = static_cast<double>(desc.byte_count()) / sec / 1e6;
  const OiBounds oi = oi_bounds(desc, edge);
  row.gflops_conservative = oi.conservative_flops * n / sec / 1e9;
  row.gflops_lenient = oi.lenient_flops * n / sec / 1e9;
  return row;
}

std::vector<BenchRow> bench_sweep(std::span<const float> data, const ArrayDescriptor& desc,
                                  const CompressionConfig& config, std::span<const int> block_edges,
                                  std::span<const int> lane_widths, int repetitions, const std::string& dataset) {
  std::vector<BenchRow> rows;
  for (const int edge : block_edges) {
    std::vector<int> seen;
    for (const int lanes : lane_widths) {
      const int eff = effective_lane_width(lanes, edge);
      if (std::find(seen.begin(), seen.end(), eff) != seen.end()) continue;
      seen.push_back(eff);
      CompressionConfig c = config;
      c.block_edge = edge;
      c.lane_width = eff;
      rows.push_back(bench_kernel(data, desc, c, repetitions, dataset));
    }
  }
  return rows;
}

void write_bench_header(std::ostream& out) {
  out << "dataset,dims,eb,block,lanes,threads,time_ms,MBps,gflops_cons,gflops_len\n";
}

void write_bench_row(std::ostream& out, const BenchRow& r) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(6);
  out << r.dataset << ',' << r.dims << ',' << r.eb << ',' << r.block << ',' << r.lanes << ',' << r.threads << ','
      << r.time_ms << ',' << r.mbps << ',' << r.gflops_conservative << ',' << r.gflops_lenient << '\n';
  out.flags(flags);
  out.precision(prec);
}

std::vector<StudyRow> autotune_study(std::span<const float> data, const ArrayDescriptor& desc, double eb,
                                     std::int32_t radius, const TuneSpace& space, std::span<const double> fractions,
                                     std::span<const int> iterations, std::uint64_t seed, int repetitions) {
  if (repetitions < 1) throw Error(ErrorCode::config, "repetitions must be >= 1");
  std::vector<double> full(space.size());
  for (std::size_t c = 0; c < space.size(); ++c) {
    const auto cfg = space.configs()[c];
    const BlockGrid grid(desc, cfg.block_edge);
    std::vector<std::size_t> all(grid.block_count());
    std::iota(all.begin(), all.end(), std::size_t{0});
    BlockWorkspace ws(desc.ndims(), cfg.block_edge);
    const LaneKernel kernel = select_kernel(cfg.lanes);
    std::vector<double> t;
    for (int r = 0; r < repetitions; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      dualquant_blocks(data, grid, all, eb, radius, kernel, ws);
      t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    full[c] = median(std::move(t));
  }
  const double best = *std::min_element(full.begin(), full.end());
  std::vector<StudyRow> rows;
  for (const double f : fractions) {
    for (const int it : iterations) {
      AutotuneSettings settings{f, it, seed};
      const TuneReport rep = autotune(data, desc, eb, radius, space, settings);
      const auto pos = std::lower_bound(space.configs().begin(), space.configs().end(), rep.chosen);
      const double chosen_time = full[static_cast<std::size_t>(pos - space.configs().begin())];
      StudyRow row;
      row.fraction = f;
      row.iterations = it;
      row.chosen = rep.chosen;
      row.pct_of_peak = 100.0 * best / chosen_time;
      row.tuning_s = rep.tuning_seconds;
      row.pct_runtime_tuning = 100.0 * rep.tuning_seconds / (rep.tuning_seconds + chosen_time);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_study_csv(std::ostream& out, std::span<const StudyRow> rows) {
  out << "fraction,iterations,block,lanes,pct_of_peak,pct_runtime_tuning,tuning_s\n";
  for (const auto& r : rows) {
    out << r.fraction << ',' << r.iterations << ',' << r.chosen.block_edge << ',' << r.chosen.lanes << ','
        << r.pct_of_peak << ',' << r.pct_runtime_tuning << ',' << r.tuning_s << '\n';
  }
}

std::vector<float> synthetic_field(const ArrayDescriptor& desc, std::uint64_t seed) {
  constexpr double kTau = 6.283185307179586;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, kTau);
  std::uniform_real_distribution<double> freq(0.5, 3.0);
  const int nd = desc.ndims();
  std::array<std::vector<double>, 3> wave;
  for (int d = 0; d < 3; ++d) {
    const double w = freq(rng);
    const double p = phase(rng);
    const std::size_t n = d < nd ? desc.extent(d) : 1;
    auto& v = wave[static_cast<std::size_t>(d)];
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(w * kTau * static_cast<double>(i) / static_cast<double>(n) + p);
  }
  std::vector<float> out(desc.element_count());
  std::size_t at = 0;
  for (const double a : wave[0]) {
    for (const double b : wave[1]) {
      for (const double c : wave[2]) out[at++] = static_cast<float>(100.0 + 10.0 * a * b + 5.0 * c);
    }
  }
  return out;
}

}  // namespace vlz
