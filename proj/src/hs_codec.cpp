#include "erdh/hs_codec.hpp"

#include "erdh/error.hpp"

#include <algorithm>
#include <cstdlib>

namespace erdh {

void HSParams::validate() const {
  if (right && (right->side != Side::Right || right->zero - right->peak < 2))
    throw Error(ErrorCode::FieldOutOfRange, "right pair needs zero >= peak + 2");
  if (left && (left->side != Side::Left || left->peak - left->zero < 2))
    throw Error(ErrorCode::FieldOutOfRange, "left pair needs zero <= peak - 2");
  if (right && left && left->peak >= right->peak)
    throw Error(ErrorCode::FieldOutOfRange, "left peak must lie below right peak");
}

namespace {

struct Candidate {
  int bin;
  std::uint64_t count;
};

// Most populated first; ties prefer bins nearer zero, then the smaller bin.
bool better_peak(const Candidate &a, const Candidate &b) {
  if (a.count != b.count)
    return a.count > b.count;
  if (std::abs(a.bin) != std::abs(b.bin))
    return std::abs(a.bin) < std::abs(b.bin);
  return a.bin < b.bin;
}

std::optional<PeakZeroPair> pick_pair(const Peh &hist, BinRange range,
                                      Side side, std::optional<int> below) {
  const int dir = side == Side::Right ? 1 : -1;
  std::vector<Candidate> candidates;
  for (const auto &[bin, count] : hist.counts) {
    if (count == 0 || bin < range.lo || bin > range.hi)
      continue;
    if (below && bin >= *below)
      continue;
    const int z = bin + 2 * dir;
    if (z < range.lo || z > range.hi)
      continue;
    candidates.push_back({bin, count});
  }
  if (candidates.empty())
    return std::nullopt;
  std::sort(candidates.begin(), candidates.end(), better_peak);

  for (const Candidate &c : candidates) {
    for (int z = c.bin + 2 * dir; z >= range.lo && z <= range.hi; z += dir)
      if (hist.count(z) == 0)
        return PeakZeroPair{c.bin, z, side};
  }

  // No empty bin anywhere on this side: the least populated bin becomes the
  // zero and its occupants go into the zero map.
  const Candidate &best = candidates.front();
  int zero = best.bin + 2 * dir;
  std::uint64_t least = hist.count(zero);
  for (int z = zero; z >= range.lo && z <= range.hi; z += dir) {
    if (hist.count(z) < least) {
      least = hist.count(z);
      zero = z;
    }
  }
  return PeakZeroPair{best.bin, zero, side};
}

} // namespace

HSParams select_pairs(const Peh &hist, BinRange range) {
  HSParams params;
  params.right = pick_pair(hist, range, Side::Right, std::nullopt);
  params.left = pick_pair(
      hist, range, Side::Left,
      params.right ? std::optional<int>(params.right->peak) : std::nullopt);
  if (params.empty())
    throw Error(ErrorCode::NoCapacity, "no peak-zero pair can be formed");
  return params;
}

int shift_value(const HSParams &p, int v, bool bit) {
  if (p.right) {
    if (v == p.right->peak)
      return v + (bit ? 1 : 0);
    if (v > p.right->peak && v < p.right->zero)
      return v + 1;
  }
  if (p.left) {
    if (v == p.left->peak)
      return v - (bit ? 1 : 0);
    if (v < p.left->peak && v > p.left->zero)
      return v - 1;
  }
  return v;
}

Unshifted unshift_value(const HSParams &p, int v) {
  if (p.right) {
    if (v == p.right->peak)
      return {v, false};
    if (v == p.right->peak + 1)
      return {p.right->peak, true};
    if (v > p.right->peak + 1 && v <= p.right->zero)
      return {v - 1, std::nullopt};
  }
  if (p.left) {
    if (v == p.left->peak)
      return {v, false};
    if (v == p.left->peak - 1)
      return {p.left->peak, true};
    if (v < p.left->peak - 1 && v >= p.left->zero)
      return {v + 1, std::nullopt};
  }
  return {v, std::nullopt};
}

HsEmbedResult hs_embed(const std::vector<int> &values, const BitVector &bits,
                       const HSParams &params, std::optional<BinRange> range) {
  params.validate();
  HsEmbedResult out;
  out.values.reserve(values.size());
  out.zero_map = BitVector(values.size());
  std::size_t next_bit = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int v = values[i];
    if (params.is_zero_bin(v)) {
      out.zero_map.set(i, true);
      out.values.push_back(v);
      continue;
    }
    bool bit = false;
    if (params.is_peak(v)) {
      bit = next_bit < bits.size() && bits[next_bit];
      ++next_bit;
    }
    const int y = shift_value(params, v, bit);
    if (range && (y < range->lo || y > range->hi))
      throw Error(ErrorCode::RangeViolation,
                  "shifted value " + std::to_string(y) + " leaves the range");
    out.values.push_back(y);
  }
  out.n_embedded = next_bit;
  if (bits.size() > out.n_embedded)
    throw Error(ErrorCode::BadLength, "more bits than peak occurrences");
  return out;
}

HsExtractResult hs_extract(const std::vector<int> &values,
                           const HSParams &params, const BitVector &zero_map) {
  params.validate();
  if (zero_map.size() != values.size())
    throw Error(ErrorCode::InconsistentState, "zero map length mismatch");
  HsExtractResult out;
  out.values.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int v = values[i];
    if (zero_map[i]) {
      if (!params.is_zero_bin(v))
        throw Error(ErrorCode::InconsistentState,
                    "marked zero-bin occupant holds a non-zero-bin value");
      out.values.push_back(v);
      continue;
    }
    const Unshifted u = unshift_value(params, v);
    if (u.bit)
      out.bits.push_back(*u.bit);
    out.values.push_back(u.value);
  }
  return out;
}

BoundaryAdjustment build_boundary_map(const BlockBuffer &block, AlgorithmId alg) {
  BoundaryAdjustment out{block, BitVector(block.pixels().size())};
  if (alg == AlgorithmId::Zero)
    return out;
  const int maxv = block.max_value();
  for (int r = 0; r < block.size(); ++r) {
    for (int c = 0; c < block.size(); ++c) {
      if (is_context(alg, r, c))
        continue;
      const int v = block.at(r, c);
      if (v == 0 || v == maxv) {
        out.pixels.set(r, c, v == 0 ? 1 : maxv - 1);
        out.boundary_map.set(static_cast<std::size_t>(r) * block.size() + c,
                             true);
      }
    }
  }
  return out;
}

void undo_boundary_map(BlockBuffer &block, const BitVector &boundary_map) {
  if (boundary_map.size() != block.pixels().size())
    throw Error(ErrorCode::InconsistentState, "boundary map length mismatch");
  const int maxv = block.max_value();
  for (int r = 0; r < block.size(); ++r) {
    for (int c = 0; c < block.size(); ++c) {
      if (!boundary_map[static_cast<std::size_t>(r) * block.size() + c])
        continue;
      const int v = block.at(r, c);
      if (v == 1)
        block.set(r, c, 0);
      else if (v == maxv - 1)
        block.set(r, c, maxv);
      else
        throw Error(ErrorCode::InconsistentState,
                    "boundary-marked pixel is not at an adjusted value");
    }
  }
}

} // namespace erdh
