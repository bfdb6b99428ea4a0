#include "vlz/container.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "vlz/error.hpp"

namespace vlz {

namespace {

constexpr std::uint8_t kMagic[4] = {'V', 'L', 'Z', '1'};
constexpr std::size_t kOffsetsAt = 96;
constexpr std::size_t kHeaderCrcAt = 144;
constexpr int kSections = 5;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      out_.push_back(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void svarint(std::int64_t v) { varint(zigzag(v)); }

  static std::uint64_t zigzag(std::int64_t v) {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
  }

  void patch_u32(std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
  }
  void patch_u64(std::size_t at, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
  }

  std::size_t size() const noexcept { return out_.size(); }
  std::vector<std::uint8_t>& data() noexcept { return out_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, const char* section) : bytes_(bytes), section_(section) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const std::uint8_t b = u8();
      if (shift == 63 && b > 1) break;
      v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if (!(b & 0x80)) return v;
    }
    fail("malformed varint");
  }
  std::int64_t svarint() {
    const std::uint64_t z = varint();
    return static_cast<std::int64_t>(z >> 1) ^ -static_cast<std::int64_t>(z & 1);
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    require(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  /// Bounds a count read from the stream by the bytes left, guarding huge allocations.
  std::size_t count(std::uint64_t n, std::size_t item_bytes) {
    if (n > remaining() / item_bytes) fail("declared item count exceeds section size");
    return static_cast<std::size_t>(n);
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  void finish() const {
    if (pos_ != bytes_.size()) fail("section has " + std::to_string(remaining()) + " unparsed bytes");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(FormatErrorKind::bad_section, std::string(section_) + " section: " + what);
  }

 private:
  void require(std::size_t n) const {
    if (remaining() < n) fail("unexpected end of section");
  }
  std::uint64_t get(int n) {
    require(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  const char* section_;
  std::size_t pos_ = 0;
};

std::uint32_t load_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

[[noreturn]] void bad_header(const std::string& what) { throw FormatError(FormatErrorKind::bad_header, what); }

struct HeaderFields {
  ContainerHeader header;
  std::array<std::uint64_t, kSections + 1> offsets{};
};

HeaderFields parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic) throw FormatError(FormatErrorKind::truncated, "file shorter than magic");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatError(FormatErrorKind::bad_magic, "not a VLZ1 container");
  }
  if (bytes.size() < kHeaderBytes) {
    throw FormatError(FormatErrorKind::truncated, "file shorter than the " + std::to_string(kHeaderBytes) + "-byte header");
  }
  Reader r(bytes.first(kHeaderBytes), "header");
  r.take(4);
  const std::uint32_t version = r.u32();
  if (version != kContainerVersion) {
    throw FormatError(FormatErrorKind::unsupported_version, "version " + std::to_string(version));
  }
  const std::uint32_t stored_crc = load_u32(bytes, kHeaderCrcAt);
  if (crc32(bytes.first(kHeaderCrcAt)) != stored_crc) {
    throw FormatError(FormatErrorKind::header_crc_mismatch, "header checksum does not match");
  }
  const std::uint32_t flags = r.u32();
  if (flags != 0) throw FormatError(FormatErrorKind::unsupported_flags, "flags 0x" + std::to_string(flags));

  HeaderFields f;
  auto& h = f.header;
  const std::uint32_t ndims = r.u32();
  if (ndims < 1 || ndims > 3) bad_header("ndims " + std::to_string(ndims));
  std::array<std::size_t, 3> dims{};
  std::uint64_t product = 1;
  for (std::uint32_t d = 0; d < 3; ++d) {
    const std::uint64_t v = r.u64();
    if (d < ndims) {
      if (v == 0) bad_header("zero extent");
      if (product > std::numeric_limits<std::uint64_t>::max() / v) bad_header("element count overflows");
      product *= v;
      dims[d] = static_cast<std::size_t>(v);
    } else if (v != 0) {
      bad_header("unused dimension slot is nonzero");
    }
  }
  const std::uint64_t count = r.u64();
  if (count != product) bad_header("element count does not match dims");
  h.descriptor = ArrayDescriptor(std::span<const std::size_t>(dims.data(), ndims));

  const std::uint32_t mode = r.u32();
  if (mode > 1) bad_header("error-bound mode " + std::to_string(mode));
  const std::uint32_t edge = r.u32();
  if (!is_valid_block_edge(static_cast<int>(edge))) bad_header("block edge " + std::to_string(edge));
  const double eb_value = r.f64();
  const double resolved = r.f64();
  if (!(std::isfinite(eb_value) && eb_value > 0)) bad_header("error-bound value is not positive and finite");
  if (!(std::isfinite(resolved) && resolved > 0)) bad_header("resolved error bound is not positive and finite");
  const std::uint32_t radius = r.u32();
  if (radius < 2 || radius > static_cast<std::uint32_t>(kMaxRadius)) bad_header("radius " + std::to_string(radius));
  const std::uint32_t lanes = r.u32();
  if (!is_valid_lane_width(static_cast<int>(lanes))) bad_header("lane width " + std::to_string(lanes));
  const std::uint32_t pad_value = r.u32();
  const std::uint32_t pad_gran = r.u32();
  if (pad_value > 3 || pad_gran > 2) bad_header("padding policy out of range");
  const std::uint32_t tuned = r.u32();
  if (tuned > 1) bad_header("tuned flag out of range");
  if (r.u32() != 0) bad_header("reserved field is nonzero");

  h.error_bound = {static_cast<ErrorBoundMode>(mode), eb_value};
  h.resolved_eb = resolved;
  h.block_edge = static_cast<int>(edge);
  h.lane_width = static_cast<int>(lanes);
  h.padding = {static_cast<PaddingValue>(pad_value), static_cast<PaddingGranularity>(pad_gran)};
  h.radius = static_cast<std::int32_t>(radius);
  h.tuned = tuned == 1;

  for (auto& off : f.offsets) off = r.u64();
  if (f.offsets[0] != kHeaderBytes) throw FormatError(FormatErrorKind::bad_offsets, "first section does not follow header");
  for (int s = 0; s < kSections; ++s) {
    if (f.offsets[s + 1] < f.offsets[s]) throw FormatError(FormatErrorKind::bad_offsets, "section offsets not ascending");
  }
  return f;
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t at = 0;
  while (at < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - at, 1u << 30));
    crc = ::crc32(crc, bytes.data() + at, n);
    at += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> serialize(const ContainerParts& parts) {
  const auto& h = parts.header;
  Writer w;
  for (auto c : kMagic) w.u8(c);
  w.u32(kContainerVersion);
  w.u32(0);
  w.u32(static_cast<std::uint32_t>(h.descriptor.ndims()));
  for (int d = 0; d < 3; ++d) w.u64(d < h.descriptor.ndims() ? h.descriptor.extent(d) : 0);
  w.u64(h.descriptor.element_count());
  w.u32(static_cast<std::uint32_t>(h.error_bound.mode));
  w.u32(static_cast<std::uint32_t>(h.block_edge));
  w.f64(h.error_bound.value);
  w.f64(h.resolved_eb);
  w.u32(static_cast<std::uint32_t>(h.radius));
  w.u32(static_cast<std::uint32_t>(h.lane_width));
  w.u32(static_cast<std::uint32_t>(h.padding.value));
  w.u32(static_cast<std::uint32_t>(h.padding.granularity));
  w.u32(h.tuned ? 1 : 0);
  w.u32(0);
  for (int s = 0; s <= kSections; ++s) w.u64(0);
  w.u32(0);

  std::array<std::uint64_t, kSections + 1> offsets{};
  offsets[0] = w.size();
  w.varint(parts.padding.size());
  std::int64_t prev = 0;
  for (auto v : parts.padding) {
    w.svarint(static_cast<std::int64_t>(static_cast<std::uint64_t>(v) - static_cast<std::uint64_t>(prev)));
    prev = v;
  }

  offsets[1] = w.size();
  w.varint(parts.codebook.size());
  std::uint32_t next_symbol = 0;
  for (const auto& e : parts.codebook.entries()) {
    w.varint(e.symbol - next_symbol);
    w.u8(e.length);
    next_symbol = e.symbol + 1u;
  }

  offsets[2] = w.size();
  w.u64(parts.symbol_count);
  w.u64(parts.bits.bit_length);
  w.bytes(parts.bits.bytes);

  offsets[3] = w.size();
  w.varint(parts.block_outlier_counts.size());
  for (auto c : parts.block_outlier_counts) w.varint(c);
  for (auto v : parts.outliers) w.u32(static_cast<std::uint32_t>(v));

  offsets[4] = w.size();
  w.varint(parts.patches.size());
  std::uint64_t next_index = 0;
  for (const auto& p : parts.patches) {
    w.varint(p.index - next_index);
    w.u32(p.bits);
    next_index = p.index + 1;
  }
  offsets[5] = w.size();

  for (int s = 0; s <= kSections; ++s) w.patch_u64(kOffsetsAt + 8 * s, offsets[s]);
  auto& out = w.data();
  w.patch_u32(kHeaderCrcAt, crc32(std::span<const std::uint8_t>(out).first(kHeaderCrcAt)));
  const std::uint32_t payload_crc = crc32(std::span<const std::uint8_t>(out).subspan(kHeaderBytes));
  w.u32(payload_crc);
  return std::move(out);
}

ContainerHeader read_header(std::span<const std::uint8_t> bytes) { return parse_header(bytes).header; }

ContainerParts deserialize(std::span<const std::uint8_t> bytes) {
  const HeaderFields f = parse_header(bytes);
  const std::uint64_t end = f.offsets[kSections];
  if (bytes.size() - kHeaderBytes < 4 || end > bytes.size() - 4) {
    throw FormatError(FormatErrorKind::truncated, "file ends before the declared payload");
  }
  if (end + 4 != bytes.size()) throw FormatError(FormatErrorKind::bad_offsets, "trailing bytes after payload");
  const std::uint32_t stored = load_u32(bytes, static_cast<std::size_t>(end));
  if (crc32(bytes.subspan(kHeaderBytes, end - kHeaderBytes)) != stored) {
    throw FormatError(FormatErrorKind::payload_crc_mismatch, "payload checksum does not match");
  }

  ContainerParts p;
  p.header = f.header;
  const auto& h = p.header;
  const BlockGrid grid(h.descriptor, h.block_edge);
  auto section = [&](int s) {
    return bytes.subspan(static_cast<std::size_t>(f.offsets[s]), static_cast<std::size_t>(f.offsets[s + 1] - f.offsets[s]));
  };

  {
    Reader r(section(0), "padding");
    const std::size_t n = r.count(r.varint(), 1);
    if (n != padding_scalar_count(h.padding, grid)) r.fail("scalar count does not match the padding policy");
    p.padding.resize(n);
    std::uint64_t prev = 0;
    for (auto& v : p.padding) {
      prev += static_cast<std::uint64_t>(r.svarint());
      v = static_cast<std::int64_t>(prev);
    }
    r.finish();
  }
  {
    Reader r(section(1), "codebook");
    const std::size_t n = r.count(r.varint(), 2);
    std::vector<std::pair<std::uint16_t, std::uint8_t>> lengths(n);
    std::uint64_t next_symbol = 0;
    for (auto& [symbol, len] : lengths) {
      const std::uint64_t s = next_symbol + r.varint();
      if (s < next_symbol || s >= 2 * static_cast<std::uint64_t>(h.radius)) {
        throw FormatError(FormatErrorKind::bad_codebook, "symbol " + std::to_string(s) + " >= 2R");
      }
      symbol = static_cast<std::uint16_t>(s);
      len = r.u8();
      next_symbol = s + 1;
    }
    r.finish();
    p.codebook = HuffmanCodebook::from_lengths(lengths);
  }
  {
    Reader r(section(2), "codes");
    p.symbol_count = r.u64();
    if (p.symbol_count != h.descriptor.element_count()) r.fail("symbol count does not match element count");
    p.bits.bit_length = r.u64();
    if (p.bits.bit_length > std::numeric_limits<std::uint64_t>::max() - 7) r.fail("bit length overflows");
    const std::uint64_t nbytes = (p.bits.bit_length + 7) / 8;
    if (nbytes != r.remaining()) r.fail("bit length does not match section size");
    const auto raw = r.take(static_cast<std::size_t>(nbytes));
    p.bits.bytes.assign(raw.begin(), raw.end());
    r.finish();
  }
  {
    Reader r(section(3), "outliers");
    const std::size_t blocks = r.count(r.varint(), 1);
    if (blocks != grid.block_count()) r.fail("block count does not match the block grid");
    p.block_outlier_counts.resize(blocks);
    std::uint64_t total = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::uint64_t c = r.varint();
      if (c > grid.block_elements(b)) r.fail("block " + std::to_string(b) + " has more outliers than elements");
      p.block_outlier_counts[b] = static_cast<std::uint32_t>(c);
      total += c;
    }
    p.outliers.resize(r.count(total, 4));
    for (auto& v : p.outliers) v = static_cast<std::int32_t>(r.u32());
    r.finish();
  }
  {
    Reader r(section(4), "patches");
    const std::size_t n = r.count(r.varint(), 5);
    p.patches.resize(n);
    std::uint64_t next_index = 0;
    for (auto& patch : p.patches) {
      const std::uint64_t gap = r.varint();
      if (next_index >= h.descriptor.element_count() || gap >= h.descriptor.element_count() - next_index) {
        r.fail("patch index out of range");
      }
      patch.index = next_index + gap;
      patch.bits = r.u32();
      next_index = patch.index + 1;
    }
    r.finish();
  }
  return p;
}

}  // namespace vlz
