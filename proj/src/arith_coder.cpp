// Single-context adaptive binary arithmetic coder with 32-bit registers and
// E1/E2/E3 renormalization. The symbol 0 always takes the lower part of the
// interval; counts start at 1/1 and are halved once their sum reaches 2^16.

#include "erdh/bitcodec.hpp"

#include "erdh/error.hpp"

namespace erdh {
namespace {

constexpr std::uint64_t kTop = 0xFFFFFFFFull;
constexpr std::uint64_t kHalf = 0x80000000ull;
constexpr std::uint64_t kQuarter = 0x40000000ull;
constexpr std::uint64_t kThreeQuarters = 0xC0000000ull;
constexpr std::uint32_t kCountLimit = 1u << 16;

struct AdaptiveModel {
  std::uint32_t c0 = 1;
  std::uint32_t c1 = 1;

  std::uint64_t split(std::uint64_t low, std::uint64_t high) const {
    return low + (high - low) * c0 / (c0 + c1);
  }

  void update(bool bit) {
    (bit ? c1 : c0) += 1;
    if (c0 + c1 == kCountLimit) {
      c0 = std::max<std::uint32_t>(1, c0 / 2);
      c1 = std::max<std::uint32_t>(1, c1 / 2);
    }
  }
};

class Encoder {
public:
  explicit Encoder(BitVector &out) : out_(out) {}

  void encode(bool bit) {
    const std::uint64_t mid = model_.split(low_, high_);
    if (bit)
      low_ = mid + 1;
    else
      high_ = mid;
    model_.update(bit);
    for (;;) {
      if (high_ < kHalf) {
        emit(false);
      } else if (low_ >= kHalf) {
        emit(true);
        low_ -= kHalf;
        high_ -= kHalf;
      } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
        ++pending_;
        low_ -= kQuarter;
        high_ -= kQuarter;
      } else {
        break;
      }
      low_ <<= 1;
      high_ = (high_ << 1) | 1;
    }
  }

  void finish() {
    ++pending_;
    emit(low_ >= kQuarter);
  }

private:
  void emit(bool bit) {
    out_.push_back(bit);
    for (; pending_ > 0; --pending_)
      out_.push_back(!bit);
  }

  BitVector &out_;
  AdaptiveModel model_;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = kTop;
  std::size_t pending_ = 0;
};

class Decoder {
public:
  Decoder(const BitVector &in, std::size_t start) : in_(in), pos_(start) {
    for (int i = 0; i < 32; ++i)
      value_ = (value_ << 1) | next_bit();
  }

  bool decode() {
    const std::uint64_t mid = model_.split(low_, high_);
    const bool bit = value_ > mid;
    if (bit)
      low_ = mid + 1;
    else
      high_ = mid;
    model_.update(bit);
    for (;;) {
      if (high_ < kHalf) {
        // nothing to subtract
      } else if (low_ >= kHalf) {
        low_ -= kHalf;
        high_ -= kHalf;
        value_ -= kHalf;
      } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
        low_ -= kQuarter;
        high_ -= kQuarter;
        value_ -= kQuarter;
      } else {
        break;
      }
      low_ <<= 1;
      high_ = (high_ << 1) | 1;
      value_ = (value_ << 1) | next_bit();
    }
    return bit;
  }

private:
  // Bits past the end of the stream read as zero.
  std::uint64_t next_bit() {
    if (pos_ < in_.size())
      return in_[pos_++] ? 1 : 0;
    ++pos_;
    return 0;
  }

  const BitVector &in_;
  std::size_t pos_;
  AdaptiveModel model_;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = kTop;
  std::uint64_t value_ = 0;
};

} // namespace

BitVector ac_compress(const BitVector &bits) {
  if (bits.size() >= (std::size_t{1} << kAcLengthBits))
    throw Error(ErrorCode::InputTooLong, "bitmap longer than 2^24 - 1 bits");
  BitVector out;
  out.append_uint(bits.size(), static_cast<int>(kAcLengthBits));
  if (bits.empty())
    return out;
  Encoder enc(out);
  for (std::size_t i = 0; i < bits.size(); ++i)
    enc.encode(bits[i]);
  enc.finish();
  return out;
}

BitVector ac_decompress(const BitVector &stream) {
  if (stream.size() < kAcLengthBits)
    throw Error(ErrorCode::CorruptStream, "stream shorter than length header");
  const std::size_t n = stream.read_uint(0, static_cast<int>(kAcLengthBits));
  if (n > 0 && stream.size() == kAcLengthBits)
    throw Error(ErrorCode::CorruptStream, "missing arithmetic-coded body");
  BitVector out;
  out.reserve(n);
  if (n > 0) {
    Decoder dec(stream, kAcLengthBits);
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(dec.decode());
  }
  if (!(ac_compress(out) == stream))
    throw Error(ErrorCode::CorruptStream,
                "stream is not a canonical arithmetic code");
  return out;
}

} // namespace erdh
