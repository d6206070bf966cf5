#include "erdh/bitcodec.hpp"

#include "erdh/error.hpp"

#include <string>

namespace erdh {

BitVector::BitVector(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits)
    bits_.push_back(b != 0);
}

void BitVector::append(const BitVector &other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

void BitVector::append_uint(std::uint64_t value, int width) {
  if (width < 64 && (value >> width) != 0)
    throw Error(ErrorCode::FieldOutOfRange,
                std::to_string(value) + " does not fit in " +
                    std::to_string(width) + " bits");
  for (int i = width - 1; i >= 0; --i)
    bits_.push_back(((value >> i) & 1u) != 0);
}

void BitVector::append_int(std::int64_t value, int width) {
  const std::int64_t lo = -(std::int64_t{1} << (width - 1));
  const std::int64_t hi = (std::int64_t{1} << (width - 1)) - 1;
  if (value < lo || value > hi)
    throw Error(ErrorCode::FieldOutOfRange,
                std::to_string(value) + " does not fit in signed " +
                    std::to_string(width) + " bits");
  append_uint(static_cast<std::uint64_t>(value) &
                  ((std::uint64_t{1} << width) - 1),
              width);
}

std::uint64_t BitVector::read_uint(std::size_t pos, int width) const {
  if (pos + static_cast<std::size_t>(width) > bits_.size())
    throw Error(ErrorCode::BadLength, "field read past end of bit vector");
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i)
    v = (v << 1) | (bits_[pos + i] ? 1u : 0u);
  return v;
}

std::int64_t BitVector::read_int(std::size_t pos, int width) const {
  const std::uint64_t raw = read_uint(pos, width);
  if (raw >> (width - 1))
    return static_cast<std::int64_t>(raw) - (std::int64_t{1} << width);
  return static_cast<std::int64_t>(raw);
}

BitVector BitVector::slice(std::size_t pos, std::size_t count) const {
  if (pos + count > bits_.size())
    throw Error(ErrorCode::BadLength, "slice past end of bit vector");
  BitVector out;
  out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                   bits_.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return out;
}

std::size_t BitVector::count_ones() const {
  std::size_t n = 0;
  for (bool b : bits_)
    n += b ? 1 : 0;
  return n;
}

std::vector<std::uint8_t> BitVector::to_bytes() const {
  std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i])
      out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return out;
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes) {
  BitVector out;
  out.reserve(bytes.size() * 8);
  for (std::uint8_t byte : bytes)
    out.append_uint(byte, 8);
  return out;
}

bool BitReader::read_bit() {
  if (pos_ >= bits_.size())
    throw Error(ErrorCode::CorruptStream, "bit stream exhausted");
  return bits_[pos_++];
}

std::uint64_t BitReader::read_uint(int width) {
  if (remaining() < static_cast<std::size_t>(width))
    throw Error(ErrorCode::CorruptStream, "bit stream exhausted");
  const std::uint64_t v = bits_.read_uint(pos_, width);
  pos_ += static_cast<std::size_t>(width);
  return v;
}

BitVector BitReader::read_bits(std::size_t count) {
  if (remaining() < count)
    throw Error(ErrorCode::CorruptStream, "bit stream exhausted");
  BitVector out = bits_.slice(pos_, count);
  pos_ += count;
  return out;
}

} // namespace erdh
