#include "vlz/huffman.hpp"

#include <algorithm>
#include <cstring>
#include <queue>
#include <string>
#include <tuple>

#include "vlz/error.hpp"

namespace vlz {

namespace {

constexpr int kLookupBits = 11;

std::vector<std::uint8_t> huffman_lengths(std::span<const std::uint64_t> weights) {
  const std::size_t leaves = weights.size();
  std::vector<std::uint8_t> lengths(leaves, 0);
  if (leaves == 0) return lengths;
  if (leaves == 1) {
    lengths[0] = 1;
    return lengths;
  }
  // (weight, smallest leaf index in subtree, node id); leaf indices follow symbol order.
  using Node = std::tuple<std::uint64_t, std::size_t, std::size_t>;
  std::priority_queue<Node, std::vector<Node>, std::greater<>> heap;
  std::vector<std::size_t> parent(2 * leaves - 1, 0);
  for (std::size_t i = 0; i < leaves; ++i) heap.emplace(weights[i], i, i);
  std::size_t next = leaves;
  while (heap.size() > 1) {
    const auto [wa, ka, a] = heap.top();
    heap.pop();
    const auto [wb, kb, b] = heap.top();
    heap.pop();
    parent[a] = next;
    parent[b] = next;
    heap.emplace(wa + wb, std::min(ka, kb), next);
    ++next;
  }
  // Internal nodes are created after their children, so walk them root-first.
  std::vector<std::uint32_t> depth(2 * leaves - 1, 0);
  for (std::size_t n = 2 * leaves - 2; n-- > 0;) depth[n] = depth[parent[n]] + 1;
  for (std::size_t i = 0; i < leaves; ++i) {
    if (depth[i] > static_cast<std::uint32_t>(kMaxCodeLength)) {
      throw Error(ErrorCode::internal, "Huffman code length exceeds 64 bits");
    }
    lengths[i] = static_cast<std::uint8_t>(depth[i]);
  }
  return lengths;
}

[[noreturn]] void bad_codebook(const std::string& what) { throw FormatError(FormatErrorKind::bad_codebook, what); }

}  // namespace

void HuffmanCodebook::assign_canonical() {
  std::vector<std::size_t> order(entries_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(entries_[a].length, entries_[a].symbol) < std::tie(entries_[b].length, entries_[b].symbol);
  });
  std::uint64_t code = 0;
  int prev = 0;
  max_length_ = 0;
  for (std::size_t n = 0; n < order.size(); ++n) {
    auto& e = entries_[order[n]];
    if (n > 0) ++code;
    code <<= (e.length - prev);
    prev = e.length;
    e.code = code;
    max_length_ = std::max(max_length_, static_cast<int>(e.length));
  }
  index_.assign(kAlphabetSize, 0);
  for (std::size_t i = 0; i < entries_.size(); ++i) index_[entries_[i].symbol] = static_cast<std::uint32_t>(i + 1);
}

HuffmanCodebook HuffmanCodebook::from_frequencies(std::span<const std::uint64_t> frequencies) {
  if (frequencies.size() > kAlphabetSize) throw Error(ErrorCode::internal, "alphabet larger than 16 bits");
  std::vector<std::uint16_t> present;
  std::vector<std::uint64_t> weights;
  for (std::size_t s = 0; s < frequencies.size(); ++s) {
    if (frequencies[s] != 0) {
      present.push_back(static_cast<std::uint16_t>(s));
      weights.push_back(frequencies[s]);
    }
  }
  const auto lengths = huffman_lengths(weights);
  HuffmanCodebook cb;
  cb.entries_.reserve(present.size());
  for (std::size_t i = 0; i < present.size(); ++i) cb.entries_.push_back({present[i], lengths[i], 0});
  cb.assign_canonical();
  return cb;
}

HuffmanCodebook HuffmanCodebook::from_lengths(std::span<const std::pair<std::uint16_t, std::uint8_t>> lengths) {
  HuffmanCodebook cb;
  if (lengths.empty()) {
    cb.index_.assign(kAlphabetSize, 0);
    return cb;
  }
  // Kraft sum scaled by 2^64, accumulated exactly in 128 bits.
  unsigned __int128 kraft = 0;
  const unsigned __int128 full = static_cast<unsigned __int128>(1) << 64;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const auto [symbol, len] = lengths[i];
    if (len < 1 || len > kMaxCodeLength) bad_codebook("code length " + std::to_string(len) + " out of range");
    if (i > 0 && symbol <= lengths[i - 1].first) bad_codebook("codebook symbols not strictly ascending");
    kraft += full >> len;
    if (kraft > full) bad_codebook("codebook over-subscribed");
    cb.entries_.push_back({symbol, len, 0});
  }
  const bool single = lengths.size() == 1 && lengths[0].second == 1;
  if (!single && kraft != full) bad_codebook("codebook is not a complete prefix code");
  cb.assign_canonical();
  return cb;
}

int HuffmanCodebook::length_of(std::uint16_t symbol) const noexcept {
  if (index_.empty()) return 0;
  const auto at = index_[symbol];
  return at == 0 ? 0 : entries_[at - 1].length;
}

std::uint64_t HuffmanCodebook::code_of(std::uint16_t symbol) const noexcept {
  if (index_.empty()) return 0;
  const auto at = index_[symbol];
  return at == 0 ? 0 : entries_[at - 1].code;
}

std::vector<std::uint64_t> symbol_frequencies(std::span<const std::uint16_t> symbols) {
  std::vector<std::uint64_t> freq(kAlphabetSize, 0);
  for (const auto s : symbols) ++freq[s];
  return freq;
}

HuffmanCodebook build_codebook(std::span<const std::uint16_t> symbols) {
  return HuffmanCodebook::from_frequencies(symbol_frequencies(symbols));
}

namespace {

class BitWriter {
 public:
  explicit BitWriter(std::size_t reserve_bits) { bytes_.reserve(reserve_bits / 8 + 1); }

  void put(std::uint64_t code, int len) {
    if (len > 32) {
      put_small(code >> 32, len - 32);
      put_small(code & 0xFFFFFFFFu, 32);
    } else {
      put_small(code, len);
    }
  }

  BitStream finish() {
    BitStream out;
    out.bit_length = written_;
    if (pending_ > 0) bytes_.push_back(static_cast<std::uint8_t>(acc_ << (8 - pending_)));
    out.bytes = std::move(bytes_);
    return out;
  }

 private:
  void put_small(std::uint64_t code, int len) {
    acc_ = (acc_ << len) | code;
    pending_ += len;
    written_ += static_cast<std::uint64_t>(len);
    while (pending_ >= 8) {
      pending_ -= 8;
      bytes_.push_back(static_cast<std::uint8_t>(acc_ >> pending_));
    }
  }

  std::vector<std::uint8_t> bytes_;
  std::uint64_t acc_ = 0;
  int pending_ = 0;
  std::uint64_t written_ = 0;
};

class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> bytes, std::uint64_t bit_length) : bytes_(bytes), bits_(bit_length) {}

  std::uint64_t position() const noexcept { return pos_; }
  std::uint64_t remaining() const noexcept { return bits_ - pos_; }

  /// Next bits MSB-aligned; at least 57 valid bits, zero past the end.
  std::uint64_t peek() const noexcept {
    const std::size_t byte = static_cast<std::size_t>(pos_ >> 3);
    std::uint64_t v = 0;
    if (byte + 8 <= bytes_.size()) {
      std::memcpy(&v, bytes_.data() + byte, 8);
      v = __builtin_bswap64(v);
    } else {
      for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | (byte + i < bytes_.size() ? bytes_[byte + i] : 0u);
    }
    return v << (pos_ & 7);
  }

  int bit() {
    if (pos_ >= bits_) throw Error(ErrorCode::corrupt_stream, "bitstream underrun");
    const int b = (bytes_[static_cast<std::size_t>(pos_ >> 3)] >> (7 - (pos_ & 7))) & 1;
    ++pos_;
    return b;
  }

  void skip(int n) { pos_ += static_cast<std::uint64_t>(n); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t bits_;
  std::uint64_t pos_ = 0;
};

}  // namespace

BitStream encode(std::span<const std::uint16_t> symbols, const HuffmanCodebook& codebook) {
  std::uint64_t total = 0;
  for (const auto s : symbols) {
    const int len = codebook.length_of(s);
    if (len == 0) throw Error(ErrorCode::corrupt_stream, "symbol " + std::to_string(s) + " not in codebook");
    total += static_cast<std::uint64_t>(len);
  }
  BitWriter w(static_cast<std::size_t>(total));
  for (const auto s : symbols) w.put(codebook.code_of(s), codebook.length_of(s));
  return w.finish();
}

std::vector<std::uint16_t> decode(std::span<const std::uint8_t> bytes, std::uint64_t bit_length,
                                  const HuffmanCodebook& codebook, std::size_t count) {
  if (bytes.size() != (bit_length + 7) / 8) {
    throw Error(ErrorCode::corrupt_stream, "bitstream byte length does not match its bit length");
  }
  std::vector<std::uint16_t> out;
  if (count == 0) {
    if (bit_length != 0) throw Error(ErrorCode::corrupt_stream, "trailing bits after last symbol");
    return out;
  }
  if (codebook.empty()) throw Error(ErrorCode::corrupt_stream, "empty codebook for non-empty stream");
  out.reserve(count);

  // Canonical tables per length.
  std::array<std::uint64_t, kMaxCodeLength + 1> first{};
  std::array<std::uint64_t, kMaxCodeLength + 1> n_at{};
  std::array<std::size_t, kMaxCodeLength + 1> offset{};
  std::vector<std::uint16_t> sorted;
  {
    std::vector<HuffmanCodebook::Entry> e(codebook.entries().begin(), codebook.entries().end());
    std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) {
      return std::tie(a.length, a.symbol) < std::tie(b.length, b.symbol);
    });
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (n_at[e[i].length] == 0) {
        first[e[i].length] = e[i].code;
        offset[e[i].length] = i;
      }
      ++n_at[e[i].length];
      sorted.push_back(e[i].symbol);
    }
  }
  const int lookup_bits = std::min(kLookupBits, codebook.max_length());
  struct Slot {
    std::uint16_t symbol;
    std::uint8_t length;  // 0: code longer than lookup_bits or invalid prefix
  };
  std::vector<Slot> lut(std::size_t{1} << lookup_bits, Slot{0, 0});
  for (const auto& e : codebook.entries()) {
    if (e.length > lookup_bits) continue;
    const int spare = lookup_bits - e.length;
    const std::uint64_t base = e.code << spare;
    for (std::uint64_t f = 0; f < (std::uint64_t{1} << spare); ++f) lut[base + f] = Slot{e.symbol, e.length};
  }

  BitReader in(bytes, bit_length);
  const int max_len = codebook.max_length();
  for (std::size_t n = 0; n < count; ++n) {
    const Slot slot = lut[in.peek() >> (64 - lookup_bits)];
    if (slot.length != 0) {
      if (in.remaining() < slot.length) throw Error(ErrorCode::corrupt_stream, "bitstream underrun");
      in.skip(slot.length);
      out.push_back(slot.symbol);
      continue;
    }
    std::uint64_t code = 0;
    bool found = false;
    for (int len = 1; len <= max_len; ++len) {
      code = (code << 1) | static_cast<std::uint64_t>(in.bit());
      if (n_at[len] != 0 && code - first[len] < n_at[len]) {
        out.push_back(sorted[offset[len] + static_cast<std::size_t>(code - first[len])]);
        found = true;
        break;
      }
    }
    if (!found) throw Error(ErrorCode::corrupt_stream, "invalid Huffman prefix at symbol " + std::to_string(n));
  }
  if (in.position() != bit_length) throw Error(ErrorCode::corrupt_stream, "trailing bits after last symbol");
  return out;
}

}  // namespace vlz
