// Regenerates the golden container fixture: make_golden <dir>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "vlz/compressor.hpp"

namespace {

void write_file(const std::string& path, const void* data, std::size_t n) {
  std::ofstream f(path, std::ios::binary);
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!f) throw std::runtime_error("cannot write " + path);
}

}  // namespace

std::vector<float> golden_field() {
  std::vector<float> v(20 * 24);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 24; ++j) {
      v[i * 24 + j] = static_cast<float>(50.0 + 3.0 * std::sin(0.3 * i) * std::cos(0.2 * j) + (i * j % 7 == 0 ? 0.9 : 0));
    }
  }
  return v;
}

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_golden <dir>\n";
    return 1;
  }
  const std::string dir = argv[1];
  const auto field = golden_field();
  vlz::CompressionConfig c;
  c.error_bound = vlz::ErrorBound::absolute(1e-3);
  c.block_edge = 8;
  c.radius = 64;
  const auto out = vlz::compress(field, vlz::ArrayDescriptor{20, 24}, c);
  write_file(dir + "/golden_input.f32", field.data(), field.size() * sizeof(float));
  write_file(dir + "/golden.vlz", out.bytes.data(), out.bytes.size());
  std::printf("%zu bytes, %zu outliers\n", out.bytes.size(), out.report.outliers);
  return 0;
}
