#pragma once

#include "erdh/bitcodec.hpp"
#include "erdh/hs_codec.hpp"
#include "erdh/image.hpp"
#include "erdh/predictors.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace erdh {

// ---------------------------------------------------------------------------
// Partition and keyed processing order
// ---------------------------------------------------------------------------

struct Position {
  int row = 0;
  int col = 0;
  bool operator==(const Position &) const = default;
};

/// Border region (aux) plus an m x m grid of q x q blocks inside the
/// interior rows/cols [t, h - t) x [t, w - t). Interior pixels not covered
/// by the grid are left over and never touched.
struct Partition {
  int height = 0;
  int width = 0;
  int t_border = 0;
  int m_grid = 0;
  int q = 0;
  std::vector<BlockView> blocks;      // grid order: top to bottom, left to right
  std::vector<Position> aux_region;   // raster order
  std::vector<Position> leftover;

  std::size_t block_count() const { return blocks.size(); }
  bool in_interior(int row, int col) const {
    return row >= t_border && row < height - t_border && col >= t_border &&
           col < width - t_border;
  }
};

/// Throws ImageTooSmall unless h - 2t >= m, w - 2t >= m and m >= 2.
Partition make_partition(int height, int width, int t_border, int m_grid);

/// xorshift64* generator; a zero seed is replaced by 1.
class XorShift64Star {
public:
  explicit XorShift64Star(std::uint64_t seed) : state_(seed == 0 ? 1 : seed) {}

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

private:
  std::uint64_t state_;
};

/// Fisher-Yates shuffle of {1..n}: for i = n-1 down to 1, swap slot i with
/// slot next() mod (i + 1).
std::vector<int> make_permutation(std::uint64_t seed, int n);

// ---------------------------------------------------------------------------
// Distortion and per-block planning
// ---------------------------------------------------------------------------

/// Additive per-pixel cost of turning an original sample into a new one.
struct DistortionModel {
  std::function<std::int64_t(int original, int modified)> cost;

  static DistortionModel squared_error() {
    return {[](int a, int b) {
      const std::int64_t d = a - b;
      return d * d;
    }};
  }
};

/// Result of running one algorithm on one block with a concrete bitstream.
struct CandidateOutcome {
  AlgorithmId alg = AlgorithmId::Zero;
  bool feasible = false;
  HSParams params;
  LocationMaps maps;
  std::size_t chunk_len = 0;
  std::int64_t net_capacity = -1; // hits minus in-band side information
  std::size_t hits = 0;           // peak occurrences met while embedding
  std::int64_t distortion = 0;    // against the block before this layer
  BitVector stream;               // the in-band bitstream actually embedded
  std::optional<BlockBuffer> marked;
};

/// In-band layout: [map_len:16][ac(boundary_map ++ zero_map)][prefix][chunk].
/// `prefix` is opaque here; the pipeline puts its chaining data there.
struct BlockRequest {
  const BitVector *payload = nullptr; // may be null when request == 0
  std::size_t payload_offset = 0;
  std::size_t requested_bits = 0;
  BitVector prefix;
};

/// Value range a pass may use for the algorithm's histogram bins.
BinRange bin_range_for(AlgorithmId alg, int max_value);

/// Builds the in-band stream for a block.
BitVector frame_block_stream(const BitVector &compressed_maps,
                             const BitVector &prefix, const BitVector *payload,
                             std::size_t offset, std::size_t len);

/// Runs boundary adjustment, pair selection and an exact embedding
/// simulation, searching for the largest chunk (up to the request) whose
/// stream fits and whose zero map is self-consistent. When the map never
/// settles, the zero bins are moved outward a step at a time and the search
/// is repeated, so `params` may differ from the plain pair selection.
CandidateOutcome evaluate_candidate(const BlockBuffer &cover, AlgorithmId alg,
                                    const BlockRequest &request,
                                    const DistortionModel &model);

struct BlockPlan {
  std::size_t block_index = 0;   // grid index into Partition::blocks
  std::size_t position = 0;      // 1-based processing position
  bool embedded = false;
  AlgorithmId alg = AlgorithmId::Zero;
  HSParams params;
  LocationMaps maps;
  std::size_t chunk_offset = 0;
  std::size_t chunk_len = 0;
  std::int64_t distortion = 0;
  std::int64_t net_capacity = -1;
  BitVector stream;
  std::optional<BlockBuffer> marked;
  std::vector<CandidateOutcome> candidates; // stripped of buffers and streams
};

/// Evaluates every candidate algorithm and applies the selection rule:
/// among candidates carrying the whole request, least distortion; otherwise
/// the largest chunk, then least distortion, then lower id. A block embeds
/// when its chunk is non-empty or when `must_embed` is set and a feasible
/// candidate exists.
BlockPlan plan_block(const BlockBuffer &cover, const BlockRequest &request,
                     std::span<const AlgorithmId> candidates,
                     const DistortionModel &model, bool must_embed = false);

struct LayerPlanOptions {
  std::vector<AlgorithmId> candidates{kAllAlgorithms.begin(),
                                      kAllAlgorithms.end()};
  DistortionModel model = DistortionModel::squared_error();
  std::size_t max_chunk = kMaxChunkLen;
  /// Forces at least one embedded block even for an empty payload.
  bool require_carrier = false;
  /// Exact per-position chunk sizes instead of front-loaded allocation.
  std::optional<std::vector<std::size_t>> fixed_chunks;
  /// Chaining data for the block at a 1-based position; `first` is true
  /// while no block has been embedded yet.
  std::function<BitVector(std::size_t position, bool first)> prefix_for;
  /// Called once per block, in processing order, after its plan is final.
  std::function<void(const BlockPlan &)> on_plan;
};

struct LayerPlan {
  std::vector<BlockPlan> plans;   // processing order
  std::size_t consumed = 0;       // payload bits placed
  std::int64_t total_distortion = 0;
  std::size_t evaluations = 0;    // (block, algorithm) candidates evaluated
};

/// Plans blocks in permutation order, each taking as much of the remaining
/// payload as it can carry.
LayerPlan plan_layer(const GrayImage &img, const Partition &partition,
                     std::span<const int> perm, const BitVector &payload,
                     const LayerPlanOptions &options = {});

/// Writes every embedded block's marked samples into `img`.
void apply_plan(GrayImage &img, const Partition &partition,
                const LayerPlan &plan);

} // namespace erdh
