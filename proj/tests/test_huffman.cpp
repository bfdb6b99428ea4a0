#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "vlz/huffman.hpp"

using namespace vlz;

namespace {

std::map<std::uint16_t, int> lengths_of(const HuffmanCodebook& cb) {
  std::map<std::uint16_t, int> m;
  for (const auto& e : cb.entries()) m[e.symbol] = e.length;
  return m;
}

std::vector<std::uint16_t> stream_from(const std::map<std::uint16_t, std::uint64_t>& freq) {
  std::vector<std::uint16_t> s;
  for (const auto& [sym, n] : freq) s.insert(s.end(), n, sym);
  return s;
}

std::uint64_t coded_bits(const HuffmanCodebook& cb, std::span<const std::uint16_t> s) {
  std::uint64_t bits = 0;
  for (const auto x : s) bits += static_cast<std::uint64_t>(cb.length_of(x));
  return bits;
}

}  // namespace

TEST_CASE("codebook examples") {
  CHECK(lengths_of(build_codebook(stream_from({{10, 1}, {11, 1}}))) == std::map<std::uint16_t, int>{{10, 1}, {11, 1}});
  const auto cb = build_codebook(stream_from({{'A', 5}, {'B', 2}, {'C', 1}, {'D', 1}}));
  CHECK(lengths_of(cb) == std::map<std::uint16_t, int>{{'A', 1}, {'B', 2}, {'C', 3}, {'D', 3}});
  // Canonical: A=0, B=10, C=110, D=111.
  CHECK(cb.code_of('A') == 0b0);
  CHECK(cb.code_of('B') == 0b10);
  CHECK(cb.code_of('C') == 0b110);
  CHECK(cb.code_of('D') == 0b111);

  const std::vector<std::uint16_t> single(37, 32768);
  const auto one = build_codebook(single);
  CHECK(lengths_of(one) == std::map<std::uint16_t, int>{{32768, 1}});
  const auto bits = encode(single, one);
  CHECK(bits.bit_length == 37);
  CHECK(decode(bits.bytes, bits.bit_length, one, 37) == single);
}

TEST_CASE("ties merge by ascending symbol") {
  // Four equal weights: a balanced tree no matter what; five equal weights distinguish
  // the tie rule. Lower symbols merge first and end up deeper.
  const auto cb = build_codebook(stream_from({{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}}));
  CHECK(lengths_of(cb) == std::map<std::uint16_t, int>{{1, 3}, {2, 3}, {3, 2}, {4, 2}, {5, 2}});
  const auto again = build_codebook(stream_from({{5, 1}, {4, 1}, {3, 1}, {2, 1}, {1, 1}}));
  CHECK(again == cb);
}

TEST_CASE("kraft equality and canonical order") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::uint16_t, std::uint64_t> freq;
    const int n = 2 + static_cast<int>(rng() % 300);
    for (int i = 0; i < n; ++i) freq[static_cast<std::uint16_t>(rng() % 65536)] = 1 + rng() % 1000;
    const auto cb = build_codebook(stream_from(freq));
    long double kraft = 0;
    for (const auto& e : cb.entries()) kraft += std::ldexp(1.0L, -e.length);
    CHECK(kraft == 1.0L);
    auto sorted = std::vector<HuffmanCodebook::Entry>(cb.entries().begin(), cb.entries().end());
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) {
      return a.length != b.length ? a.length < b.length : a.symbol < b.symbol;
    });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      const auto prev = sorted[i - 1];
      CHECK(sorted[i].code == ((prev.code + 1) << (sorted[i].length - prev.length)));
    }
  }
}

TEST_CASE("optimality against exhaustive search") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 6);
    std::vector<std::uint64_t> f(k);
    std::map<std::uint16_t, std::uint64_t> freq;
    for (std::size_t i = 0; i < k; ++i) {
      f[i] = 1 + rng() % 40;
      freq[static_cast<std::uint16_t>(i * 3)] = f[i];
    }
    const auto s = stream_from(freq);
    const auto cb = build_codebook(s);
    CHECK(coded_bits(cb, s) == oracle::optimal_prefix_bits(f));
    if (k <= 5) CHECK(coded_bits(cb, s) == oracle::optimal_lengths_bits(f));
  }
}

TEST_CASE("encode/decode round trip") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::geometric_distribution<int> g(trial % 2 ? 0.5 : 0.01);
    std::vector<std::uint16_t> s(1 + rng() % 20000);
    for (auto& x : s) x = static_cast<std::uint16_t>(32768 + (g(rng) % 3000) * (rng() % 2 ? 1 : -1));
    const auto cb = build_codebook(s);
    const auto bits = encode(s, cb);
    CHECK(bits.bytes.size() == (bits.bit_length + 7) / 8);
    CHECK(decode(bits.bytes, bits.bit_length, cb, s.size()) == s);
  }
}

TEST_CASE("long codes from fibonacci weights") {
  // Fibonacci frequencies give a maximally skewed tree; 40 symbols -> depth 39.
  std::vector<std::uint16_t> s;
  std::uint64_t a = 1, b = 1;
  for (std::uint16_t sym = 0; sym < 30; ++sym) {
    s.insert(s.end(), a, sym);
    const auto c = a + b;
    a = b;
    b = c;
  }
  const auto cb = build_codebook(s);
  CHECK(cb.max_length() == 29);
  const auto bits = encode(s, cb);
  CHECK(decode(bits.bytes, bits.bit_length, cb, s.size()) == s);
}

TEST_CASE("empty stream") {
  const HuffmanCodebook cb = HuffmanCodebook::from_lengths({});
  CHECK(decode({}, 0, cb, 0).empty());
  CHECK(encode({}, build_codebook({})).bit_length == 0);
}

TEST_CASE("decoder rejects bad input") {
  std::mt19937_64 rng(17);
  std::vector<std::uint16_t> s(5000);
  for (auto& x : s) x = static_cast<std::uint16_t>(rng() % 50);
  const auto cb = build_codebook(s);
  const auto bits = encode(s, cb);
  auto corrupt = [&](std::span<const std::uint8_t> bytes, std::uint64_t nbits, std::size_t count) {
    try {
      decode(bytes, nbits, cb, count);
      return false;
    } catch (const Error& e) {
      return e.code() == ErrorCode::corrupt_stream;
    }
  };
  // Truncations at every length short of the full stream must fail cleanly.
  for (std::uint64_t cut = 0; cut < bits.bit_length; cut += 1 + rng() % 97) {
    std::vector<std::uint8_t> head(bits.bytes.begin(), bits.bytes.begin() + static_cast<std::ptrdiff_t>((cut + 7) / 8));
    CHECK(corrupt(head, cut, s.size()));
  }
  CHECK(corrupt(bits.bytes, bits.bit_length, s.size() - 1));  // trailing bits
  CHECK(corrupt(bits.bytes, bits.bit_length + 3, s.size()));  // byte count mismatch or underrun
  CHECK_THROWS_AS(encode(std::vector<std::uint16_t>{60}, cb), Error);

  // A single-symbol code only accepts zero bits.
  const auto one = build_codebook(std::vector<std::uint16_t>{9, 9});
  const std::vector<std::uint8_t> ones{0xFF};
  try {
    decode(ones, 2, one, 2);
    FAIL("expected invalid prefix");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::corrupt_stream);
  }

  // Random bit flips never crash: either a clean error or some decoded output.
  for (int trial = 0; trial < 200; ++trial) {
    auto flipped = bits.bytes;
    flipped[rng() % flipped.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
    try {
      const auto out = decode(flipped, bits.bit_length, cb, s.size());
      CHECK(out.size() == s.size());
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::corrupt_stream);
    }
  }
}

TEST_CASE("codebook validation from stored lengths") {
  using L = std::vector<std::pair<std::uint16_t, std::uint8_t>>;
  CHECK_NOTHROW(HuffmanCodebook::from_lengths(L{{3, 1}, {7, 2}, {9, 2}}));
  CHECK_NOTHROW(HuffmanCodebook::from_lengths(L{{3, 1}}));
  CHECK_THROWS_AS(HuffmanCodebook::from_lengths(L{{3, 2}}), FormatError);           // incomplete
  CHECK_THROWS_AS(HuffmanCodebook::from_lengths(L{{3, 1}, {7, 1}, {9, 2}}), FormatError);  // over-full
  CHECK_THROWS_AS(HuffmanCodebook::from_lengths(L{{7, 1}, {3, 1}}), FormatError);   // unsorted
  CHECK_THROWS_AS(HuffmanCodebook::from_lengths(L{{3, 0}, {7, 1}}), FormatError);   // zero length
  CHECK_THROWS_AS(HuffmanCodebook::from_lengths(L{{3, 65}, {7, 1}}), FormatError);  // too long
  const auto cb = build_codebook(std::vector<std::uint16_t>{1, 1, 1, 2, 2, 3});
  L stored;
  for (const auto& e : cb.entries()) stored.emplace_back(e.symbol, e.length);
  CHECK(HuffmanCodebook::from_lengths(stored) == cb);
  const auto rebuilt = HuffmanCodebook::from_lengths(stored);
  for (const auto& e : rebuilt.entries()) CHECK(e.code == cb.code_of(e.symbol));
}
