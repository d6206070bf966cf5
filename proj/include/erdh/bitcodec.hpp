#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace erdh {

/// Ordered bit sequence. Multi-bit fields are written and read MSB first.
class BitVector {
public:
  BitVector() = default;
  explicit BitVector(std::size_t n, bool value = false) : bits_(n, value) {}
  BitVector(std::initializer_list<int> bits);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool v) { bits_[i] = v; }

  void push_back(bool b) { bits_.push_back(b); }
  void append(const BitVector &other);
  /// Appends the low `width` bits of `value`, most significant first.
  void append_uint(std::uint64_t value, int width);
  /// Two's-complement field; throws FieldOutOfRange when it does not fit.
  void append_int(std::int64_t value, int width);

  std::uint64_t read_uint(std::size_t pos, int width) const;
  std::int64_t read_int(std::size_t pos, int width) const;

  BitVector slice(std::size_t pos, std::size_t count) const;
  std::size_t count_ones() const;

  void reserve(std::size_t n) { bits_.reserve(n); }
  void resize(std::size_t n) { bits_.resize(n); }

  /// Packs into bytes MSB first, zero padding the final byte.
  std::vector<std::uint8_t> to_bytes() const;
  static BitVector from_bytes(std::span<const std::uint8_t> bytes);

  bool operator==(const BitVector &) const = default;

private:
  std::vector<bool> bits_;
};

/// Sequential reader over a BitVector; reading past the end throws
/// CorruptStream.
class BitReader {
public:
  explicit BitReader(const BitVector &bits) : bits_(bits) {}

  bool read_bit();
  std::uint64_t read_uint(int width);
  BitVector read_bits(std::size_t count);

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bits_.size() - pos_; }

private:
  const BitVector &bits_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Auxiliary records
// ---------------------------------------------------------------------------

inline constexpr std::uint8_t kAuxMagic = 0xA5;
inline constexpr std::uint8_t kAuxVersion = 1;
inline constexpr std::size_t kAuxHeaderBits = 96;
inline constexpr std::size_t kBlockRecordBits = 65;

struct AuxHeader {
  std::uint8_t magic = kAuxMagic;
  std::uint8_t version = kAuxVersion; // 4 bits
  std::uint8_t layer_index = 1;       // 1-based
  std::uint8_t t_border = 1;
  std::uint8_t m_grid = 2;            // 4 bits, N = m * m
  std::uint64_t perm_seed = 0;

  bool operator==(const AuxHeader &) const = default;
};

BitVector pack_header(const AuxHeader &h);
/// Throws BadLength for a wrong-size input, BadMagic for a wrong magic byte
/// and FieldOutOfRange for invalid version, layer, border or grid values.
AuxHeader unpack_header(const BitVector &bits);

/// Side information for one block, stored in the record slot of the border.
///
/// Layout (65 bits, MSB first): embedded_flag:1, alg_id:2, pair_flags:2
/// (right present, left present), four 9-bit two's-complement bins
/// (p_r, z_r, p_l, z_l), position:8, chunk_len:16. `position` is the 1-based
/// index of the block in processing order; it lets the extractor find the
/// last embedded block when trailing blocks were skipped.
struct BlockRecord {
  bool embedded = false;
  std::uint8_t alg_id = 0;
  bool right_present = false;
  bool left_present = false;
  std::int16_t peak_right = 0;
  std::int16_t zero_right = 0;
  std::int16_t peak_left = 0;
  std::int16_t zero_left = 0;
  std::uint8_t position = 0;
  std::uint32_t chunk_len = 0;

  bool operator==(const BlockRecord &) const = default;
};

inline constexpr std::uint32_t kMaxChunkLen = (1u << 16) - 1;
inline constexpr int kBinMin = -256;
inline constexpr int kBinMax = 255;

BitVector pack_record(const BlockRecord &r);
BlockRecord unpack_record(const BitVector &bits);

// ---------------------------------------------------------------------------
// Adaptive binary arithmetic coder
// ---------------------------------------------------------------------------

inline constexpr std::size_t kAcLengthBits = 24;

/// 24-bit length header followed by a single-context adaptive binary
/// arithmetic code of the bits. Throws InputTooLong for >= 2^24 bits.
BitVector ac_compress(const BitVector &bits);
/// Inverse of ac_compress. The whole stream must be exactly what
/// ac_compress would produce for the decoded bits, otherwise CorruptStream.
BitVector ac_decompress(const BitVector &stream);

} // namespace erdh
