#include "vlz/autotune.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <tuple>

#include "vlz/dualquant.hpp"
#include "vlz/kernels.hpp"

namespace vlz {

TuneSpace TuneSpace::make(std::span<const int> block_edges, std::span<const int> lane_widths) {
  std::vector<TuneConfig> configs;
  for (const int edge : block_edges) {
    if (!is_valid_block_edge(edge)) throw Error(ErrorCode::config, "invalid block edge " + std::to_string(edge));
    for (const int lanes : lane_widths) {
      if (lanes != 4 && lanes != 8 && lanes != 16) {
        throw Error(ErrorCode::config, "tuning lane width must be 4, 8 or 16 (got " + std::to_string(lanes) + ")");
      }
      configs.push_back({edge, effective_lane_width(lanes, edge)});
    }
  }
  return of(std::move(configs));
}

TuneSpace TuneSpace::of(std::vector<TuneConfig> configs) {
  std::sort(configs.begin(), configs.end());
  configs.erase(std::unique(configs.begin(), configs.end()), configs.end());
  if (configs.empty()) throw Error(ErrorCode::config, "empty tuning space");
  TuneSpace s;
  s.configs_ = std::move(configs);
  return s;
}

TuneSpace TuneSpace::full() {
  auto lanes = native_lane_widths();
  if (lanes.empty()) lanes = {4};
  return make(kBlockEdges, lanes);
}

bool TuneSpace::contains(const TuneConfig& c) const noexcept {
  return std::binary_search(configs_.begin(), configs_.end(), c);
}

int TuneSpace::max_block_edge() const noexcept {
  int m = 0;
  for (const auto& c : configs_) m = std::max(m, c.block_edge);
  return m;
}

TuneTimer wall_clock_timer() {
  return [](const TuneConfig&, const std::function<void()>& work) {
    const auto t0 = std::chrono::steady_clock::now();
    work();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
}

std::vector<std::size_t> sample_blocks(const BlockGrid& grid, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::config, "sample fraction must be in (0, 1] (got " + std::to_string(fraction) + ")");
  }
  const std::size_t n = grid.block_count();
  if (n == 0) throw Error(ErrorCode::config, "cannot sample an empty block grid");
  const auto want = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))), 1, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < want; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(want);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

// Blocks of `fine` lying inside the listed blocks of `coarse` (whose edge is a multiple).
std::vector<std::size_t> sub_blocks(const BlockGrid& coarse, std::span<const std::size_t> blocks, const BlockGrid& fine) {
  const int nd = coarse.ndims();
  const auto ratio = static_cast<std::size_t>(coarse.block_edge() / fine.block_edge());
  const auto fine_dims = fine.blocks_per_dim();
  std::vector<std::size_t> out;
  for (const std::size_t b : blocks) {
    const auto c = coarse.block_coords(b);
    std::array<std::size_t, 3> lo{0, 0, 0}, hi{1, 1, 1};
    for (int d = 0; d < nd; ++d) {
      const auto ud = static_cast<std::size_t>(d);
      lo[ud] = c[ud] * ratio;
      hi[ud] = std::min(lo[ud] + ratio, fine_dims[ud]);
    }
    std::array<std::size_t, 3> strides{1, 1, 1};
    for (int d = nd - 2; d >= 0; --d) {
      strides[static_cast<std::size_t>(d)] = strides[static_cast<std::size_t>(d) + 1] * fine_dims[static_cast<std::size_t>(d) + 1];
    }
    for (std::size_t i = lo[0]; i < hi[0]; ++i) {
      for (std::size_t j = lo[1]; j < hi[1]; ++j) {
        for (std::size_t k = lo[2]; k < hi[2]; ++k) {
          out.push_back(i * strides[0] + (nd > 1 ? j * strides[1] : 0) + (nd > 2 ? k * strides[2] : 0));
        }
      }
    }
  }
  return out;
}

}  // namespace

TuneConfig choose_config(std::span<const TuneMeasurement> measurements) {
  if (measurements.empty()) throw Error(ErrorCode::config, "no measurements to choose from");
  const TuneMeasurement* best = &measurements[0];
  for (const auto& m : measurements.subspan(1)) {
    if (m.mean < best->mean ||
        (m.mean == best->mean && std::tie(m.config.block_edge, m.config.lanes) >
                                     std::tie(best->config.block_edge, best->config.lanes))) {
      best = &m;
    }
  }
  return best->config;
}

TuneReport autotune(std::span<const float> data, const ArrayDescriptor& desc, double eb, std::int32_t radius,
                    const TuneSpace& space, const AutotuneSettings& settings, const TuneTimer& timer) {
  if (settings.iterations < 1) throw Error(ErrorCode::config, "autotune iterations must be >= 1");
  if (data.size() != desc.element_count()) throw Error(ErrorCode::input_size, "data length does not match descriptor");
  if (space.size() == 0) throw Error(ErrorCode::config, "empty tuning space");
  const auto t0 = std::chrono::steady_clock::now();

  const BlockGrid coarse(desc, space.max_block_edge());
  const auto sample = sample_blocks(coarse, settings.fraction, settings.seed);

  struct Candidate {
    TuneConfig config;
    BlockGrid grid;
    std::vector<std::size_t> blocks;
    LaneKernel kernel;
    BlockWorkspace workspace;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(space.size());
  for (const auto& cfg : space.configs()) {
    BlockGrid grid(desc, cfg.block_edge);
    auto blocks = sub_blocks(coarse, sample, grid);
    candidates.push_back({cfg, grid, std::move(blocks), select_kernel(cfg.lanes), BlockWorkspace(desc.ndims(), cfg.block_edge)});
  }

  TuneReport report;
  report.sample_fraction = settings.fraction;
  report.iterations = settings.iterations;
  report.sampled_blocks = sample.size();
  report.measurements.resize(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) report.measurements[c].config = candidates[c].config;

  for (int it = 0; it < settings.iterations; ++it) {
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      auto& cand = candidates[c];
      const auto work = [&] { dualquant_blocks(data, cand.grid, cand.blocks, eb, radius, cand.kernel, cand.workspace); };
      report.measurements[c].seconds.push_back(timer(cand.config, work));
    }
  }
  for (auto& m : report.measurements) {
    const double n = static_cast<double>(m.seconds.size());
    m.mean = std::accumulate(m.seconds.begin(), m.seconds.end(), 0.0) / n;
    double ss = 0.0;
    for (const double s : m.seconds) ss += (s - m.mean) * (s - m.mean);
    m.stddev = m.seconds.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  report.chosen = choose_config(report.measurements);
  report.tuning_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

TuneReport autotune(std::span<const float> data, const ArrayDescriptor& desc, double eb, std::int32_t radius,
                    const TuneSpace& space, const AutotuneSettings& settings) {
  return autotune(data, desc, eb, radius, space, settings, wall_clock_timer());
}

TuneSpace narrowed_autotune(std::span<const TuneConfig> history, const TuneSpace& full, std::size_t k) {
  if (history.empty() || k == 0) return full;
  const auto configs = full.configs();
  std::vector<std::size_t> freq(configs.size(), 0);
  for (const auto& h : history) {
    const auto it = std::lower_bound(configs.begin(), configs.end(), h);
    if (it != configs.end() && *it == h) ++freq[static_cast<std::size_t>(it - configs.begin())];
  }
  std::vector<std::size_t> order(configs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return freq[a] > freq[b]; });
  std::vector<TuneConfig> picked;
  for (std::size_t i = 0; i < order.size() && picked.size() < k; ++i) {
    if (freq[order[i]] > 0) picked.push_back(configs[order[i]]);
  }
  if (picked.empty()) return full;
  return TuneSpace::of(std::move(picked));
}

TuneSpace narrowed_autotune(std::span<const TuneReport> history, const TuneSpace& full, std::size_t k) {
  std::vector<TuneConfig> chosen;
  chosen.reserve(history.size());
  for (const auto& r : history) chosen.push_back(r.chosen);
  return narrowed_autotune(chosen, full, k);
}

void write_tune_csv(std::ostream& out, const TuneReport& report) {
  out << "block,lanes,mean_s,stddev_s,chosen\n";
  for (const auto& m : report.measurements) {
    out << m.config.block_edge << ',' << m.config.lanes << ',' << m.mean << ',' << m.stddev << ','
        << (m.config == report.chosen ? 1 : 0) << '\n';
  }
}

}  // namespace vlz
