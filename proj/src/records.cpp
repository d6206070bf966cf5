#include "erdh/bitcodec.hpp"

#include "erdh/error.hpp"

namespace erdh {

BitVector pack_header(const AuxHeader &h) {
  if (h.version > 15)
    throw Error(ErrorCode::FieldOutOfRange, "version exceeds 4 bits");
  if (h.layer_index < 1)
    throw Error(ErrorCode::FieldOutOfRange, "layer index is 1-based");
  if (h.t_border < 1)
    throw Error(ErrorCode::FieldOutOfRange, "border width must be >= 1");
  if (h.m_grid < 2 || h.m_grid > 15)
    throw Error(ErrorCode::FieldOutOfRange, "grid side must be in [2, 15]");
  BitVector out;
  out.reserve(kAuxHeaderBits);
  out.append_uint(h.magic, 8);
  out.append_uint(h.version, 4);
  out.append_uint(h.layer_index, 8);
  out.append_uint(h.t_border, 8);
  out.append_uint(h.m_grid, 4);
  out.append_uint(h.perm_seed, 64);
  return out;
}

AuxHeader unpack_header(const BitVector &bits) {
  if (bits.size() != kAuxHeaderBits)
    throw Error(ErrorCode::BadLength, "aux header must be 96 bits");
  AuxHeader h;
  h.magic = static_cast<std::uint8_t>(bits.read_uint(0, 8));
  if (h.magic != kAuxMagic)
    throw Error(ErrorCode::BadMagic, "aux header magic mismatch");
  h.version = static_cast<std::uint8_t>(bits.read_uint(8, 4));
  h.layer_index = static_cast<std::uint8_t>(bits.read_uint(12, 8));
  h.t_border = static_cast<std::uint8_t>(bits.read_uint(20, 8));
  h.m_grid = static_cast<std::uint8_t>(bits.read_uint(28, 4));
  h.perm_seed = bits.read_uint(32, 64);
  if (h.version != kAuxVersion || h.layer_index < 1 || h.t_border < 1 ||
      h.m_grid < 2)
    throw Error(ErrorCode::FieldOutOfRange, "aux header field out of range");
  return h;
}

namespace {

void check_bin(int v) {
  if (v < kBinMin || v > kBinMax)
    throw Error(ErrorCode::FieldOutOfRange, "bin value exceeds 9 bits");
}

} // namespace

BitVector pack_record(const BlockRecord &r) {
  if (r.alg_id > 3)
    throw Error(ErrorCode::FieldOutOfRange, "alg_id exceeds 2 bits");
  if (r.chunk_len > kMaxChunkLen)
    throw Error(ErrorCode::FieldOutOfRange, "chunk_len exceeds 16 bits");
  check_bin(r.peak_right);
  check_bin(r.zero_right);
  check_bin(r.peak_left);
  check_bin(r.zero_left);
  if (!r.embedded && !(r == BlockRecord{}))
    throw Error(ErrorCode::FieldOutOfRange,
                "a non-embedded record must be all zero");
  BitVector out;
  out.reserve(kBlockRecordBits);
  out.push_back(r.embedded);
  out.append_uint(r.alg_id, 2);
  out.push_back(r.right_present);
  out.push_back(r.left_present);
  out.append_int(r.peak_right, 9);
  out.append_int(r.zero_right, 9);
  out.append_int(r.peak_left, 9);
  out.append_int(r.zero_left, 9);
  out.append_uint(r.position, 8);
  out.append_uint(r.chunk_len, 16);
  return out;
}

BlockRecord unpack_record(const BitVector &bits) {
  if (bits.size() != kBlockRecordBits)
    throw Error(ErrorCode::BadLength, "block record must be 65 bits");
  BlockRecord r;
  r.embedded = bits[0];
  r.alg_id = static_cast<std::uint8_t>(bits.read_uint(1, 2));
  r.right_present = bits[3];
  r.left_present = bits[4];
  r.peak_right = static_cast<std::int16_t>(bits.read_int(5, 9));
  r.zero_right = static_cast<std::int16_t>(bits.read_int(14, 9));
  r.peak_left = static_cast<std::int16_t>(bits.read_int(23, 9));
  r.zero_left = static_cast<std::int16_t>(bits.read_int(32, 9));
  r.position = static_cast<std::uint8_t>(bits.read_uint(41, 8));
  r.chunk_len = static_cast<std::uint32_t>(bits.read_uint(49, 16));
  return r;
}

} // namespace erdh
