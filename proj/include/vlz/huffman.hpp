#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace vlz {

inline constexpr int kMaxCodeLength = 64;
inline constexpr std::size_t kAlphabetSize = 65536;

/// Canonical Huffman code over 16-bit symbols, fully described by (symbol, length) pairs.
class HuffmanCodebook {
 public:
  struct Entry {
    std::uint16_t symbol;
    std::uint8_t length;
    std::uint64_t code;  // right-aligned, `length` bits
  };

  HuffmanCodebook() = default;

  /// Optimal lengths from frequencies (indexed by symbol). Ties are merged in ascending
  /// order of (weight, smallest symbol in subtree). A lone symbol gets length 1.
  static HuffmanCodebook from_frequencies(std::span<const std::uint64_t> frequencies);

  /// Rebuilds a code from stored lengths. Throws FormatError(bad_codebook) unless the
  /// symbols are strictly ascending and the lengths form a complete prefix code (or a
  /// single length-1 symbol).
  static HuffmanCodebook from_lengths(std::span<const std::pair<std::uint16_t, std::uint8_t>> lengths);

  /// Entries in ascending symbol order.
  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  int max_length() const noexcept { return max_length_; }

  /// 0 if the symbol is not in the code.
  int length_of(std::uint16_t symbol) const noexcept;
  std::uint64_t code_of(std::uint16_t symbol) const noexcept;

  friend bool operator==(const HuffmanCodebook& a, const HuffmanCodebook& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
      if (a.entries_[i].symbol != b.entries_[i].symbol || a.entries_[i].length != b.entries_[i].length) return false;
    }
    return true;
  }

 private:
  void assign_canonical();

  std::vector<Entry> entries_;
  std::vector<std::uint32_t> index_;  // symbol -> entry index + 1, 0 when absent
  int max_length_ = 0;
};

std::vector<std::uint64_t> symbol_frequencies(std::span<const std::uint16_t> symbols);
HuffmanCodebook build_codebook(std::span<const std::uint16_t> symbols);

struct BitStream {
  std::vector<std::uint8_t> bytes;  // MSB-first within each byte
  std::uint64_t bit_length = 0;

  friend bool operator==(const BitStream&, const BitStream&) = default;
};

/// Throws corrupt_stream for a symbol missing from the codebook.
BitStream encode(std::span<const std::uint16_t> symbols, const HuffmanCodebook& codebook);

/// Decodes exactly `count` symbols that must consume exactly `bit_length` bits.
/// Throws corrupt_stream on underrun, an invalid prefix, or trailing bits.
std::vector<std::uint16_t> decode(std::span<const std::uint8_t> bytes, std::uint64_t bit_length,
                                  const HuffmanCodebook& codebook, std::size_t count);

}  // namespace vlz
