#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracle.hpp"
#include "vlz/bench.hpp"

namespace fs = std::filesystem;
using namespace vlz;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "vlz");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("vlz_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const TempDir& tmp() {
  static TempDir t;
  return t;
}

std::string field_file() {
  static const std::string path = [] {
    const auto p = tmp() / "field.f32";
    cli::write_raw(p, synthetic_field(ArrayDescriptor{20, 30, 40}));
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("exit code mapping") {
  CHECK(cli::exit_code_for(ErrorCode::config) == 2);
  CHECK(cli::exit_code_for(ErrorCode::io) == 3);
  CHECK(cli::exit_code_for(ErrorCode::input_size) == 4);
  CHECK(cli::exit_code_for(ErrorCode::degenerate_range) == 5);
  CHECK(cli::exit_code_for(ErrorCode::bound_too_small) == 5);
  CHECK(cli::exit_code_for(ErrorCode::non_finite) == 5);
  CHECK(cli::exit_code_for(ErrorCode::format) == 6);
  CHECK(cli::exit_code_for(ErrorCode::corrupt_stream) == 7);
  CHECK(cli::exit_code_for(ErrorCode::internal) == 70);
}

TEST_CASE("descriptor folding and padding syntax") {
  CHECK(cli::make_descriptor({4, 5}, false) == ArrayDescriptor{4, 5});
  CHECK(cli::make_descriptor({2, 3, 4, 5}, true) == ArrayDescriptor{6, 4, 5});
  CHECK_THROWS_AS(cli::make_descriptor({2, 3, 4, 5}, false), Error);
  CHECK(cli::parse_padding("mean") == PaddingPolicy{PaddingValue::mean, PaddingGranularity::global});
  CHECK(cli::parse_padding("max:edge") == PaddingPolicy{PaddingValue::maximum, PaddingGranularity::edge});
  CHECK(cli::parse_padding("min:block") == PaddingPolicy{PaddingValue::minimum, PaddingGranularity::block});
  CHECK(cli::parse_padding("zero") == PaddingPolicy{PaddingValue::zero, PaddingGranularity::global});
  CHECK_THROWS_AS(cli::parse_padding("median"), Error);
  CHECK_THROWS_AS(cli::parse_padding("mean:row"), Error);
  CHECK(cli::format_padding(cli::parse_padding("mean:edge")) == "mean:edge");
  const auto a = cli::parse_autotune("0.2,4,7");
  CHECK(a.fraction == 0.2);
  CHECK(a.iterations == 4);
  CHECK(a.seed == 7);
  CHECK_THROWS_AS(cli::parse_autotune("0.2"), Error);
}

TEST_CASE("compress, verify, decompress") {
  const auto in = field_file();
  const auto c = tmp() / "a.vlz";
  auto r = run({"compress", "-i", in, "-d", "20,30,40", "--abs", "1e-3", "-o", c});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("ratio") != std::string::npos);
  r = run({"verify", "-i", in, "-c", c});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("PASS max_error=", 0) == 0);
  r = run({"decompress", "-i", c, "-o", tmp() / "a.f32"});
  CHECK(r.code == 0);
  CHECK(fs::file_size(tmp() / "a.f32") == 20 * 30 * 40 * 4);

  // The documented default padding gives identical bytes.
  const auto c2 = tmp() / "b.vlz";
  CHECK(run({"compress", "-i", in, "-d", "20,30,40", "--abs", "1e-3", "--pad", "mean:global", "-o", c2}).code == 0);
  CHECK(cli::read_bytes(c) == cli::read_bytes(c2));

  // Verify against a different original fails with its own code.
  auto other = synthetic_field(ArrayDescriptor{20, 30, 40});
  other[5] += 1.0f;
  cli::write_raw(tmp() / "other.f32", other);
  r = run({"verify", "-i", tmp() / "other.f32", "-c", c});
  CHECK(r.code == 8);
  CHECK(r.out.rfind("FAIL", 0) == 0);
}

TEST_CASE("error exits") {
  const auto in = field_file();
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"compress", "-i", in, "-d", "20,30,40", "-o", tmp() / "x.vlz"}).code != 0);  // no bound
  CHECK(run({"compress", "-i", in, "-d", "20,30,40", "--abs", "1e-3", "--rel", "1e-3", "-o", tmp() / "x.vlz"}).code != 0);
  CHECK(run({"compress", "-i", in, "-d", "20,30,40", "--abs", "1e-3", "--block", "12", "-o", tmp() / "x.vlz"}).code == 2);
  CHECK(run({"compress", "-i", in, "-d", "20,30,40", "--abs", "1e-3", "--pad", "bogus", "-o", tmp() / "x.vlz"}).code == 2);
  CHECK(run({"compress", "-i", tmp() / "missing.f32", "-d", "4", "--abs", "1e-3", "-o", tmp() / "x.vlz"}).code == 3);
  CHECK(run({"compress", "-i", in, "-d", "20,30,41", "--abs", "1e-3", "-o", tmp() / "x.vlz"}).code == 4);

  cli::write_raw(tmp() / "flat.f32", std::vector<float>(64, 1.0f));
  CHECK(run({"compress", "-i", tmp() / "flat.f32", "-d", "64", "--rel", "1e-3", "-o", tmp() / "x.vlz"}).code == 5);

  const auto c = tmp() / "c.vlz";
  REQUIRE(run({"compress", "-i", in, "-d", "20,30,40", "--abs", "1e-3", "-o", c}).code == 0);
  auto bytes = cli::read_bytes(c);
  bytes[200] ^= 0x10;
  cli::write_bytes(tmp() / "bad.vlz", bytes);
  const auto r = run({"decompress", "-i", tmp() / "bad.vlz", "-o", tmp() / "bad.f32"});
  CHECK(r.code == 6);
  CHECK(r.err.find("payload_crc_mismatch") != std::string::npos);
  cli::write_bytes(tmp() / "junk.vlz", {1, 2, 3});
  CHECK(run({"decompress", "-i", tmp() / "junk.vlz", "-o", tmp() / "bad.f32"}).code == 6);
}

TEST_CASE("configuration precedence") {
  const auto in = field_file();
  {
    std::ofstream cfg(tmp() / "vlz.ini");
    cfg << "block=32\nthreads=3\n";
  }
  const std::vector<std::string> base{"compress", "-i", in, "-d", "20,30,40", "--abs", "1e-3", "-o", tmp() / "p.vlz"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  };
  auto r = with({"--config", tmp() / "vlz.ini"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("block 32") != std::string::npos);
  CHECK(r.out.find("threads 3") != std::string::npos);

  r = with({"--config", tmp() / "vlz.ini", "--block", "16", "--threads", "2"});
  CHECK(r.out.find("block 16") != std::string::npos);
  CHECK(r.out.find("threads 2") != std::string::npos);

  ::setenv("VLZ_THREADS", "4", 1);
  r = with({});
  CHECK(r.out.find("threads 4") != std::string::npos);
  r = with({"--config", tmp() / "vlz.ini"});
  CHECK(r.out.find("threads 3") != std::string::npos);
  r = with({"--threads", "1"});
  CHECK(r.out.find("threads 1") != std::string::npos);
  ::setenv("VLZ_THREADS", "0", 1);
  CHECK(with({}).code == 2);
  ::unsetenv("VLZ_THREADS");

  CHECK(with({"--config", tmp() / "nope.ini"}).code == 2);
}

TEST_CASE("folded 4D input") {
  cli::write_raw(tmp() / "f4.f32", synthetic_field(ArrayDescriptor{6, 10, 12}));
  const auto r = run({"compress", "-i", tmp() / "f4.f32", "-d", "2,3,10,12", "--fold", "--abs", "1e-2", "-o",
                      tmp() / "f4.vlz"});
  CHECK(r.code == 0);
  CHECK(r.out.find("6x10x12") != std::string::npos);
}

TEST_CASE("analysis commands write CSV") {
  const auto in = field_file();
  auto r = run({"analyze", "-i", in, "-d", "20,30,40", "--abs", "1e-2,1e-3", "--block", "8", "--pad", "zero,mean"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
    ++n;
  }
  CHECK(n == 5);

  r = run({"rd", "-i", in, "-d", "20,30,40", "--abs", "1e-1,1e-2,1e-3"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("eb,rate_bits,psnr_db,outliers,outlier_border_pct\n", 0) == 0);

  r = run({"bench", "--synthetic", "16,16,16", "--block", "8", "--lanes", "1,8", "--reps", "3", "--csv",
           tmp() / "bench.csv"});
  CHECK(r.code == 0);
  std::ifstream csv(tmp() / "bench.csv");
  std::getline(csv, line);
  CHECK(line == "dataset,dims,eb,block,lanes,threads,time_ms,MBps,gflops_cons,gflops_len");
  n = 0;
  while (std::getline(csv, line)) ++n;
  CHECK(n == 2);
  CHECK(run({"bench", "--synthetic", "16,16,16", "--reps", "2"}).code == 2);

  r = run({"compress", "-i", in, "-d", "20,30,40", "--abs", "1e-3", "--autotune", "0.5,1", "-o", tmp() / "t.vlz"});
  CHECK(r.code == 0);
  CHECK(r.out.find("autotune: block") != std::string::npos);
}
