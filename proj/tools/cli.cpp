#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "vlz/bench.hpp"
#include "vlz/compressor.hpp"
#include "vlz/container.hpp"
#include "vlz/dualquant.hpp"
#include "vlz/metrics.hpp"

namespace vlz::cli {

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::config: return exit_config;
    case ErrorCode::io: return exit_io;
    case ErrorCode::input_size: return exit_input_size;
    case ErrorCode::degenerate_range:
    case ErrorCode::bound_too_small:
    case ErrorCode::non_finite: return exit_data;
    case ErrorCode::format: return exit_format;
    case ErrorCode::corrupt_stream: return exit_corrupt;
    case ErrorCode::internal: return exit_internal;
  }
  return exit_internal;
}

ArrayDescriptor make_descriptor(const std::vector<std::size_t>& dims, bool fold) {
  if (dims.empty()) throw Error(ErrorCode::config, "dims are required (-d)");
  if (dims.size() <= 3) return ArrayDescriptor(std::span<const std::size_t>(dims));
  if (!fold) {
    throw Error(ErrorCode::config, std::to_string(dims.size()) + " dims given; pass --fold to fold leading dims into 3D");
  }
  std::vector<std::size_t> folded(dims.end() - 2, dims.end());
  std::size_t lead = 1;
  for (std::size_t i = 0; i + 2 < dims.size(); ++i) lead *= dims[i];
  folded.insert(folded.begin(), lead);
  return ArrayDescriptor(std::span<const std::size_t>(folded));
}

PaddingPolicy parse_padding(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string gran = colon == std::string::npos ? "global" : text.substr(colon + 1);
  PaddingPolicy p;
  if (kind == "zero") p.value = PaddingValue::zero;
  else if (kind == "min") p.value = PaddingValue::minimum;
  else if (kind == "max") p.value = PaddingValue::maximum;
  else if (kind == "mean") p.value = PaddingValue::mean;
  else throw Error(ErrorCode::config, "unknown padding kind '" + kind + "' (zero|min|max|mean)");
  if (gran == "global") p.granularity = PaddingGranularity::global;
  else if (gran == "block") p.granularity = PaddingGranularity::block;
  else if (gran == "edge") p.granularity = PaddingGranularity::edge;
  else throw Error(ErrorCode::config, "unknown padding granularity '" + gran + "' (global|block|edge)");
  return p;
}

std::string format_padding(const PaddingPolicy& policy) {
  static const char* kinds[] = {"zero", "min", "max", "mean"};
  static const char* grans[] = {"global", "block", "edge"};
  return std::string(kinds[static_cast<int>(policy.value)]) + ":" + grans[static_cast<int>(policy.granularity)];
}

AutotuneSettings parse_autotune(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 3) {
    throw Error(ErrorCode::config, "--autotune expects fraction,iterations[,seed] (got '" + text + "')");
  }
  AutotuneSettings s;
  try {
    std::size_t used = 0;
    s.fraction = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    s.iterations = std::stoi(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    if (parts.size() == 3) {
      s.seed = std::stoull(parts[2], &used);
      if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::config, "malformed --autotune value '" + text + "'");
  }
  if (!(s.fraction > 0.0 && s.fraction <= 1.0)) throw Error(ErrorCode::config, "autotune fraction must be in (0, 1]");
  if (s.iterations < 1) throw Error(ErrorCode::config, "autotune iterations must be >= 1");
  return s;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::io, "error reading '" + path.string() + "'");
  return bytes;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io, "error writing '" + path.string() + "'");
}

std::vector<float> read_raw(const std::filesystem::path& path, const ArrayDescriptor& desc) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::io, "cannot read '" + path.string() + "': " + ec.message());
  if (size != desc.byte_count()) {
    throw Error(ErrorCode::input_size, "'" + path.string() + "' has " + std::to_string(size) + " bytes, dims need " +
                                           std::to_string(desc.byte_count()));
  }
  std::vector<float> data(desc.element_count());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(desc.byte_count()));
  if (!in) throw Error(ErrorCode::io, "error reading '" + path.string() + "'");
  return data;
}

void write_raw(const std::filesystem::path& path, const std::vector<float>& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!out) throw Error(ErrorCode::io, "error writing '" + path.string() + "'");
}

namespace {

// Opens --csv or falls back to the command's stdout.
class CsvSink {
 public:
  CsvSink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
      if (!*file_) throw Error(ErrorCode::io, "cannot create '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : fallback_; }
  bool to_file() const noexcept { return file_ != nullptr; }
  void close() {
    if (file_) {
      file_->flush();
      if (!*file_) throw Error(ErrorCode::io, "error writing CSV");
    }
  }

 private:
  std::ostream& fallback_;
  std::unique_ptr<std::ofstream> file_;
};

std::string dims_text(const ArrayDescriptor& desc) {
  std::string s;
  for (int d = 0; d < desc.ndims(); ++d) s += (d ? "x" : "") + std::to_string(desc.extent(d));
  return s;
}

struct ShapeFlags {
  std::string input;
  std::vector<std::size_t> dims;
  bool fold = false;
};

void add_shape(CLI::App* app, ShapeFlags& f, bool input_required = true) {
  auto* i = app->add_option("-i,--input", f.input, "raw little-endian fp32 input");
  if (input_required) i->required();
  app->add_option("-d,--dims", f.dims, "dims, slowest first (comma list)")->delimiter(',');
  app->add_flag("--fold", f.fold, "fold leading dims of a 4D+ shape into 3D");
}

struct BoundFlags {
  std::optional<double> abs;
  std::optional<double> rel;
};

void add_bound(CLI::App* app, BoundFlags& f) {
  auto* a = app->add_option("--abs", f.abs, "absolute error bound");
  auto* r = app->add_option("--rel", f.rel, "value-range relative error bound");
  a->excludes(r);
}

ErrorBound bound_from(const BoundFlags& f, std::optional<ErrorBound> fallback = std::nullopt) {
  if (f.abs) return ErrorBound::absolute(*f.abs);
  if (f.rel) return ErrorBound::relative(*f.rel);
  if (fallback) return *fallback;
  throw Error(ErrorCode::config, "an error bound is required (--abs or --rel)");
}

struct ListBoundFlags {
  std::vector<double> abs;
  std::vector<double> rel;
};

void add_bound_list(CLI::App* app, ListBoundFlags& f) {
  auto* a = app->add_option("--abs", f.abs, "absolute error bounds (comma list)")->delimiter(',');
  auto* r = app->add_option("--rel", f.rel, "relative error bounds (comma list)")->delimiter(',');
  a->excludes(r);
}

std::pair<ErrorBoundMode, std::vector<double>> bounds_from(const ListBoundFlags& f) {
  if (!f.abs.empty()) return {ErrorBoundMode::absolute, f.abs};
  if (!f.rel.empty()) return {ErrorBoundMode::value_range_relative, f.rel};
  throw Error(ErrorCode::config, "error bounds are required (--abs or --rel)");
}

std::vector<int> checked_edges(const std::vector<int>& edges) {
  for (const int e : edges) {
    if (!is_valid_block_edge(e)) throw Error(ErrorCode::config, "block edge must be 8, 16, 32 or 64 (got " + std::to_string(e) + ")");
  }
  return edges;
}

std::vector<int> checked_lanes(const std::vector<int>& lanes) {
  for (const int l : lanes) {
    if (!is_valid_lane_width(l)) throw Error(ErrorCode::config, "lane width must be 1, 4, 8 or 16 (got " + std::to_string(l) + ")");
  }
  return lanes;
}

struct Input {
  ArrayDescriptor desc;
  std::vector<float> data;
  std::string name;
};

Input load_input(const ShapeFlags& f, const std::vector<std::size_t>& synthetic = {}) {
  Input in;
  if (!synthetic.empty()) {
    in.desc = make_descriptor(synthetic, f.fold);
    in.data = synthetic_field(in.desc);
    in.name = "synthetic";
    return in;
  }
  if (f.input.empty()) throw Error(ErrorCode::config, "an input file (-i) or --synthetic dims is required");
  in.desc = make_descriptor(f.dims, f.fold);
  in.data = read_raw(f.input, in.desc);
  in.name = std::filesystem::path(f.input).stem().string();
  return in;
}

struct CompressFlags {
  ShapeFlags shape;
  BoundFlags bound;
  std::string output;
  int block = 0;
  int lanes = 1;
  std::string pad = "mean:global";
  std::string autotune;
  int threads = 1;
  std::string csv;
};

int cmd_compress(const CompressFlags& f, std::ostream& out) {
  CompressOptions opt;
  opt.config.error_bound = bound_from(f.bound);
  opt.config.block_edge = f.block;
  opt.config.lane_width = f.lanes;
  opt.config.padding = parse_padding(f.pad);
  opt.config.thread_count = f.threads;
  if (!f.autotune.empty()) opt.autotune = parse_autotune(f.autotune);
  opt.config.validate();

  const Input in = load_input(f.shape);
  const Compressed c = compress(in.data, in.desc, opt);
  write_bytes(f.output, c.bytes);
  const auto& r = c.report;
  out << "compressed " << dims_text(in.desc) << " (" << r.element_count << " elements) to " << f.output << ": ratio "
      << std::setprecision(6) << r.ratio << ", rate " << r.rate_bits << " bits/elem, outliers " << r.outliers
      << ", patches " << r.patches << ", eb " << r.resolved_eb << ", block " << r.block_edge << ", lanes "
      << r.lane_width << " (" << to_string(r.backend) << "), threads " << f.threads << ", " << r.total_seconds << " s\n";
  if (r.tune) {
    out << "autotune: block " << r.tune->chosen.block_edge << " lanes " << r.tune->chosen.lanes << " from "
        << r.tune->measurements.size() << " configs, " << r.tune->tuning_seconds << " s ("
        << 100.0 * r.tune->tuning_runtime_fraction << "% of runtime)\n";
    if (!f.csv.empty()) {
      CsvSink csv(f.csv, out);
      write_tune_csv(csv.stream(), *r.tune);
      csv.close();
    }
  }
  return exit_ok;
}

struct DecompressFlags {
  std::string input;
  std::string output;
  int threads = 1;
};

int cmd_decompress(const DecompressFlags& f, std::ostream& out) {
  const auto bytes = read_bytes(f.input);
  const Decompressed d = decompress(bytes, f.threads);
  write_raw(f.output, d.data);
  out << "decompressed " << dims_text(d.header.descriptor) << " (" << d.data.size() << " elements) to " << f.output
      << '\n';
  return exit_ok;
}

struct VerifyFlags {
  std::string original;
  std::string container;
  int threads = 1;
};

int cmd_verify(const VerifyFlags& f, std::ostream& out) {
  const auto bytes = read_bytes(f.container);
  const Decompressed d = decompress(bytes, f.threads);
  const auto original = read_raw(f.original, d.header.descriptor);
  const double max_err = max_abs_error(original, d.data);
  const double eb = d.header.resolved_eb;
  const bool pass = max_err <= eb;
  out << (pass ? "PASS" : "FAIL") << " max_error=" << std::setprecision(9) << max_err << " eb=" << eb << " psnr=";
  try {
    out << psnr(original, d.data);
  } catch (const Error&) {
    out << "n/a";
  }
  out << '\n';
  return pass ? exit_ok : exit_verify_failed;
}

struct SweepFlags {
  ShapeFlags shape;
  ListBoundFlags bounds;
  std::vector<int> blocks;
  std::vector<std::string> pads;
  int threads = 1;
  std::string csv;
};

std::vector<PaddingPolicy> all_policies() {
  std::vector<PaddingPolicy> v{{PaddingValue::zero, PaddingGranularity::global}};
  for (auto value : {PaddingValue::minimum, PaddingValue::maximum, PaddingValue::mean}) {
    for (auto g : {PaddingGranularity::global, PaddingGranularity::block, PaddingGranularity::edge}) v.push_back({value, g});
  }
  return v;
}

int cmd_analyze(const SweepFlags& f, std::ostream& out) {
  const auto [mode, bounds] = bounds_from(f.bounds);
  std::vector<PaddingPolicy> policies;
  for (const auto& p : f.pads) policies.push_back(parse_padding(p));
  if (policies.empty()) policies = all_policies();
  const auto blocks = checked_edges(f.blocks);
  const Input in = load_input(f.shape);
  const std::vector<int> edges = blocks.empty() ? std::vector<int>{default_block_edge(in.desc.ndims())} : blocks;

  CsvSink csv(f.csv, out);
  auto& s = csv.stream();
  s << "eb,block,padding,outliers,border_outliers,border_outlier_pct,reduction_vs_zero_pct,container_bytes,rate_bits,"
       "psnr_db\n";
  for (const double eb : bounds) {
    for (const int edge : edges) {
      CompressionConfig base;
      base.error_bound = {mode, eb};
      base.block_edge = edge;
      base.thread_count = f.threads;
      const double resolved = resolve_error_bound(base.error_bound, in.data);
      const BlockGrid grid(in.desc, edge);
      const LaneKernel kernel = select_kernel(1);
      CompressionConfig zero = base;
      zero.padding = {PaddingValue::zero, PaddingGranularity::global};
      const std::size_t zero_outliers = run_dualquant(in.data, in.desc, zero, resolved, kernel).stream.outliers.size();
      for (const auto& policy : policies) {
        CompressionConfig c = base;
        c.padding = policy;
        const auto rd = rate_distortion(in.data, in.desc, c, std::span<const double>(&eb, 1)).front();
        const auto stream = run_dualquant(in.data, in.desc, c, resolved, kernel).stream;
        const OutlierReport o = outlier_report(stream, grid);
        const double reduction =
            zero_outliers ? 100.0 * (static_cast<double>(zero_outliers) - static_cast<double>(o.outliers)) /
                                static_cast<double>(zero_outliers)
                          : 0.0;
        s << resolved << ',' << edge << ',' << format_padding(policy) << ',' << o.outliers << ',' << o.border_outliers
          << ',' << o.border_pct << ',' << reduction << ',' << rd.container_bytes << ',' << rd.rate_bits << ','
          << rd.psnr_db << '\n';
      }
    }
  }
  csv.close();
  if (csv.to_file()) out << "wrote " << f.csv << '\n';
  return exit_ok;
}

int cmd_rd(const SweepFlags& f, std::ostream& out) {
  const auto [mode, bounds] = bounds_from(f.bounds);
  const auto blocks = checked_edges(f.blocks);
  const Input in = load_input(f.shape);
  CompressionConfig c;
  c.error_bound.mode = mode;
  c.block_edge = blocks.empty() ? 0 : blocks.front();
  c.padding = f.pads.empty() ? PaddingPolicy{} : parse_padding(f.pads.front());
  c.thread_count = f.threads;
  const auto rows = rate_distortion(in.data, in.desc, c, bounds);
  CsvSink csv(f.csv, out);
  csv.stream() << std::setprecision(9);
  write_rd_csv(csv.stream(), rows);
  csv.close();
  if (csv.to_file()) out << "wrote " << f.csv << '\n';
  return exit_ok;
}

struct BenchFlags {
  ShapeFlags shape;
  BoundFlags bound;
  std::vector<std::size_t> synthetic;
  std::vector<int> blocks{8, 16, 32, 64};
  std::vector<int> lanes{1, 4, 8, 16};
  std::string pad = "mean:global";
  int reps = 10;
  int threads = 1;
  std::string dataset;
  std::optional<double> peak_bw;
  std::string csv;
};

int cmd_bench(const BenchFlags& f, std::ostream& out) {
  const auto edges = checked_edges(f.blocks);
  const auto lanes = checked_lanes(f.lanes);
  CompressionConfig c;
  c.error_bound = bound_from(f.bound, ErrorBound::absolute(1e-4));
  c.padding = parse_padding(f.pad);
  c.thread_count = f.threads;
  c.validate();
  const Input in = load_input(f.shape, f.synthetic);
  const auto rows = bench_sweep(in.data, in.desc, c, edges, lanes, f.reps, f.dataset.empty() ? in.name : f.dataset);

  CsvSink csv(f.csv, out);
  write_bench_header(csv.stream());
  for (const auto& r : rows) write_bench_row(csv.stream(), r);
  csv.close();
  if (csv.to_file()) {
    for (const auto& r : rows) {
      out << "block " << r.block << " lanes " << r.lanes << " (" << to_string(r.backend) << "): " << r.time_ms
          << " ms, " << r.mbps << " MB/s\n";
    }
  }
  if (f.peak_bw) {
    const auto oi = oi_bounds(in.desc, edges.front());
    out << "roofline at " << *f.peak_bw << " GB/s: conservative OI " << oi.conservative << " flop/B -> "
        << roofline_gflops(oi.conservative, *f.peak_bw) << " GFLOP/s, lenient OI " << oi.lenient << " flop/B -> "
        << roofline_gflops(oi.lenient, *f.peak_bw) << " GFLOP/s\n";
  }
  return exit_ok;
}

struct StudyFlags {
  ShapeFlags shape;
  BoundFlags bound;
  std::vector<std::size_t> synthetic;
  std::vector<int> blocks{8, 16, 32, 64};
  std::vector<int> lanes;
  std::vector<double> fractions{0.01, 0.05, 0.1, 0.2};
  std::vector<int> iterations{1, 3, 5};
  std::uint64_t seed = 1;
  int reps = 3;
  std::string csv;
};

int cmd_autotune_study(const StudyFlags& f, std::ostream& out) {
  const auto edges = checked_edges(f.blocks);
  std::vector<int> lanes = f.lanes.empty() ? native_lane_widths() : f.lanes;
  if (lanes.empty()) lanes = {4};
  const TuneSpace space = TuneSpace::make(edges, lanes);
  for (const double fr : f.fractions) {
    if (!(fr > 0.0 && fr <= 1.0)) throw Error(ErrorCode::config, "fractions must be in (0, 1]");
  }
  for (const int it : f.iterations) {
    if (it < 1) throw Error(ErrorCode::config, "iterations must be >= 1");
  }
  const Input in = load_input(f.shape, f.synthetic);
  const double eb = resolve_error_bound(bound_from(f.bound, ErrorBound::absolute(1e-4)), in.data);
  const auto rows = autotune_study(in.data, in.desc, eb, kDefaultRadius, space, f.fractions, f.iterations, f.seed, f.reps);
  CsvSink csv(f.csv, out);
  write_study_csv(csv.stream(), rows);
  csv.close();
  if (csv.to_file()) out << "wrote " << f.csv << '\n';
  return exit_ok;
}

void add_threads(CLI::App* app, int& threads) {
  app->add_option("--threads", threads, "worker threads")->envname("VLZ_THREADS")->check(CLI::PositiveNumber);
}

// Keys outside a [section] belong to the subcommand being run.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  explicit SubcommandConfig(const CLI::App& app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    const auto subs = app_.get_subcommands();
    if (subs.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty() || (item.parents.size() == 1 && item.parents.front() == "default")) {
        item.parents = {subs.front()->get_name()};
      }
    }
    return items;
  }

 private:
  const CLI::App& app_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"vlz: vectorized error-bounded lossy compressor for fp32 arrays"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file (keys of the active subcommand)");
  app.config_formatter(std::make_shared<SubcommandConfig>(app));
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();

  CompressFlags cf;
  auto* compress_cmd = app.add_subcommand("compress", "compress a raw fp32 file");
  add_shape(compress_cmd, cf.shape);
  add_bound(compress_cmd, cf.bound);
  compress_cmd->add_option("-o,--output", cf.output, "container path")->required();
  compress_cmd->add_option("--block", cf.block, "block edge (8|16|32|64)");
  compress_cmd->add_option("--lanes", cf.lanes, "lane width (1|4|8|16)");
  compress_cmd->add_option("--pad", cf.pad, "padding kind:granularity")->capture_default_str();
  compress_cmd->add_option("--autotune", cf.autotune, "fraction,iterations[,seed]");
  add_threads(compress_cmd, cf.threads);
  compress_cmd->add_option("--csv", cf.csv, "write the autotune grid here");

  DecompressFlags df;
  auto* decompress_cmd = app.add_subcommand("decompress", "decompress a container to raw fp32");
  decompress_cmd->add_option("-i,--input", df.input, "container path")->required();
  decompress_cmd->add_option("-o,--output", df.output, "raw output path")->required();
  add_threads(decompress_cmd, df.threads);

  VerifyFlags vf;
  auto* verify_cmd = app.add_subcommand("verify", "check a container against its original");
  verify_cmd->add_option("-i,--input", vf.original, "original raw fp32 file")->required();
  verify_cmd->add_option("-c,--container", vf.container, "container path")->required();
  add_threads(verify_cmd, vf.threads);

  SweepFlags af;
  auto* analyze_cmd = app.add_subcommand("analyze", "padding/outlier study CSV over bounds x blocks x policies");
  add_shape(analyze_cmd, af.shape);
  add_bound_list(analyze_cmd, af.bounds);
  analyze_cmd->add_option("--block", af.blocks, "block edges (comma list)")->delimiter(',');
  analyze_cmd->add_option("--pad", af.pads, "padding policies (comma list, default all)")->delimiter(',');
  add_threads(analyze_cmd, af.threads);
  analyze_cmd->add_option("--csv", af.csv, "CSV output path (default stdout)");

  SweepFlags rf;
  auto* rd_cmd = app.add_subcommand("rd", "rate-distortion CSV over an error-bound ladder");
  add_shape(rd_cmd, rf.shape);
  add_bound_list(rd_cmd, rf.bounds);
  rd_cmd->add_option("--block", rf.blocks, "block edge")->delimiter(',');
  rd_cmd->add_option("--pad", rf.pads, "padding policy");
  add_threads(rd_cmd, rf.threads);
  rd_cmd->add_option("--csv", rf.csv, "CSV output path (default stdout)");

  BenchFlags bf;
  auto* bench_cmd = app.add_subcommand("bench", "dual-quant bandwidth sweep over block x lanes");
  add_shape(bench_cmd, bf.shape, false);
  add_bound(bench_cmd, bf.bound);
  bench_cmd->add_option("--synthetic", bf.synthetic, "generate a smooth field of these dims")->delimiter(',');
  bench_cmd->add_option("--block", bf.blocks, "block edges")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--lanes", bf.lanes, "lane widths")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--pad", bf.pad, "padding kind:granularity")->capture_default_str();
  bench_cmd->add_option("--reps", bf.reps, "repetitions (>= 3)")->capture_default_str();
  add_threads(bench_cmd, bf.threads);
  bench_cmd->add_option("--dataset", bf.dataset, "dataset label for the CSV");
  bench_cmd->add_option("--peak-bw", bf.peak_bw, "peak memory bandwidth in GB/s for roofline ceilings");
  bench_cmd->add_option("--csv", bf.csv, "CSV output path (default stdout)");

  StudyFlags sf;
  auto* study_cmd = app.add_subcommand("autotune-study", "autotune quality/overhead grid over fraction x iterations");
  add_shape(study_cmd, sf.shape, false);
  add_bound(study_cmd, sf.bound);
  study_cmd->add_option("--synthetic", sf.synthetic, "generate a smooth field of these dims")->delimiter(',');
  study_cmd->add_option("--block", sf.blocks, "block edges")->delimiter(',');
  study_cmd->add_option("--lanes", sf.lanes, "lane widths (default: native)")->delimiter(',');
  study_cmd->add_option("--fractions", sf.fractions, "sample fractions")->delimiter(',');
  study_cmd->add_option("--iterations", sf.iterations, "iteration counts")->delimiter(',');
  study_cmd->add_option("--seed", sf.seed, "sampling seed");
  study_cmd->add_option("--reps", sf.reps, "full-field timing repetitions");
  study_cmd->add_option("--csv", sf.csv, "CSV output path (default stdout)");

  if (const char* env = std::getenv("VLZ_THREADS"); env && *env) {
    int n = 0;
    const auto [end, ec] = std::from_chars(env, env + std::strlen(env), n);
    if (ec != std::errc{} || *end != '\0' || n < 1) {
      err << "vlz: VLZ_THREADS must be a positive integer (got '" << env << "')\n";
      return exit_config;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ValidationError& e) {
    err << "vlz: " << e.what() << '\n';
    return exit_config;
  } catch (const CLI::ConfigError& e) {
    err << "vlz: " << e.what() << '\n';
    return exit_config;
  } catch (const CLI::FileError& e) {
    err << "vlz: " << e.what() << '\n';
    return exit_config;
  } catch (const CLI::ParseError& e) {
    err << "vlz: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (compress_cmd->parsed()) return cmd_compress(cf, out);
    if (decompress_cmd->parsed()) return cmd_decompress(df, out);
    if (verify_cmd->parsed()) return cmd_verify(vf, out);
    if (analyze_cmd->parsed()) return cmd_analyze(af, out);
    if (rd_cmd->parsed()) return cmd_rd(rf, out);
    if (bench_cmd->parsed()) return cmd_bench(bf, out);
    if (study_cmd->parsed()) return cmd_autotune_study(sf, out);
  } catch (const Error& e) {
    err << "vlz: " << to_string(e.code()) << " error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::bad_alloc&) {
    err << "vlz: out of memory\n";
    return exit_internal;
  } catch (const std::exception& e) {
    err << "vlz: internal error: " << e.what() << '\n';
    return exit_internal;
  }
  return exit_usage;
}

}  // namespace vlz::cli
