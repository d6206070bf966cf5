#pragma once

#include "erdh/bitcodec.hpp"
#include "erdh/predictors.hpp"

#include <optional>
#include <vector>

namespace erdh {

enum class Side : std::uint8_t { Right, Left };

/// Peak bin carrying one bit per occurrence and the zero bin absorbing the
/// shift. Right pairs have zero > peak, left pairs zero < peak, and
/// |peak - zero| >= 2 always.
struct PeakZeroPair {
  int peak = 0;
  int zero = 0;
  Side side = Side::Right;

  bool operator==(const PeakZeroPair &) const = default;
};

struct HSParams {
  std::optional<PeakZeroPair> right;
  std::optional<PeakZeroPair> left;

  /// Throws FieldOutOfRange when the pair invariants do not hold.
  void validate() const;
  bool empty() const { return !right && !left; }

  bool is_zero_bin(int v) const {
    return (right && v == right->zero) || (left && v == left->zero);
  }
  bool is_peak(int v) const {
    return (right && v == right->peak) || (left && v == left->peak);
  }

  bool operator==(const HSParams &) const = default;
};

/// Inclusive range of histogram values a pass may produce.
struct BinRange {
  int lo = kBinMin;
  int hi = kBinMax;
};

struct LocationMaps {
  BitVector boundary_map;
  BitVector zero_map;

  bool operator==(const LocationMaps &) const = default;
};

/// Chooses up to two peak-zero pairs. Peaks are the most populated bins
/// (ties: smaller |bin|, then smaller bin) that have an empty bin at
/// distance >= 2 on their side; the nearest such empty bin is the zero. A
/// side with no empty bin falls back to its least-populated bin, whose
/// occupants are then recorded in the zero map. Throws NoCapacity when no
/// pair can be formed.
HSParams select_pairs(const Peh &hist, BinRange range = {});

/// Single-element rules shared by the sequence codec and the block embedder.
/// `shift_value` must not be called for zero-bin occupants.
int shift_value(const HSParams &params, int v, bool bit);

struct Unshifted {
  int value = 0;
  std::optional<bool> bit;
};
Unshifted unshift_value(const HSParams &params, int v);

struct HsEmbedResult {
  std::vector<int> values;
  std::size_t n_embedded = 0;
  BitVector zero_map;
};

/// Embeds `bits` (zero padded to capacity) in scan order. Throws
/// RangeViolation if an output leaves `range`, and BadLength if there are
/// more bits than peak occurrences.
HsEmbedResult hs_embed(const std::vector<int> &values, const BitVector &bits,
                       const HSParams &params,
                       std::optional<BinRange> range = std::nullopt);

struct HsExtractResult {
  std::vector<int> values;
  BitVector bits;
};

/// Exact inverse of hs_embed; marked positions whose value is not a zero bin
/// raise InconsistentState.
HsExtractResult hs_extract(const std::vector<int> &values,
                           const HSParams &params, const BitVector &zero_map);

/// Pre-adjusts saturated embeddable pixels of the predictive algorithms
/// (0 -> 1, max -> max - 1). The zero predictor needs no adjustment.
struct BoundaryAdjustment {
  BlockBuffer pixels;
  BitVector boundary_map;
};
BoundaryAdjustment build_boundary_map(const BlockBuffer &block, AlgorithmId alg);
/// Reverts build_boundary_map given its map.
void undo_boundary_map(BlockBuffer &block, const BitVector &boundary_map);

} // namespace erdh
