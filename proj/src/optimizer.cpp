#include "erdh/optimizer.hpp"

#include "erdh/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

namespace erdh {

Partition make_partition(int height, int width, int t_border, int m_grid) {
  if (m_grid < 2 || t_border < 0 || height - 2 * t_border < m_grid ||
      width - 2 * t_border < m_grid)
    throw Error(ErrorCode::ImageTooSmall,
                std::to_string(height) + "x" + std::to_string(width) +
                    " cannot hold a " + std::to_string(m_grid) + "x" +
                    std::to_string(m_grid) + " grid inside border " +
                    std::to_string(t_border));
  Partition p;
  p.height = height;
  p.width = width;
  p.t_border = t_border;
  p.m_grid = m_grid;
  p.q = std::min((height - 2 * t_border) / m_grid,
                 (width - 2 * t_border) / m_grid);
  for (int r = 0; r < m_grid; ++r)
    for (int c = 0; c < m_grid; ++c)
      p.blocks.push_back({t_border + r * p.q, t_border + c * p.q, p.q});

  const int grid_end = t_border + m_grid * p.q;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (!p.in_interior(r, c))
        p.aux_region.push_back({r, c});
      else if (r >= grid_end || c >= grid_end)
        p.leftover.push_back({r, c});
    }
  }
  return p;
}

std::vector<int> make_permutation(std::uint64_t seed, int n) {
  std::vector<int> perm(static_cast<std::size_t>(std::max(n, 0)));
  std::iota(perm.begin(), perm.end(), 1);
  XorShift64Star rng(seed);
  for (int i = n - 1; i >= 1; --i) {
    const auto j = static_cast<std::size_t>(
        rng.next() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
  }
  return perm;
}

BinRange bin_range_for(AlgorithmId alg, int max_value) {
  if (alg == AlgorithmId::Zero)
    return {0, max_value};
  return {std::max(-max_value, kBinMin), std::min(max_value, kBinMax)};
}

BitVector frame_block_stream(const BitVector &compressed_maps,
                             const BitVector &prefix, const BitVector *payload,
                             std::size_t offset, std::size_t len) {
  BitVector s;
  s.reserve(16 + compressed_maps.size() + prefix.size() + len);
  s.append_uint(compressed_maps.size(), 16);
  s.append(compressed_maps);
  s.append(prefix);
  for (std::size_t i = 0; i < len; ++i)
    s.push_back((*payload)[offset + i]);
  return s;
}

namespace {

constexpr int kMaxSearchIterations = 24;
// Maps that are still moving after this many updates rarely settle at all.
constexpr std::size_t kMaxMapChanges = 12;
// How far the zero bins may be pushed outward when the map will not settle.
constexpr int kMaxZeroShifts = 6;

struct Simulation {
  BlockBuffer marked;
  std::size_t hits = 0;
  BitVector skipped; // pixels whose error met a zero bin while embedding
};

// Embeds `stream` into the boundary-adjusted block in raster order. Each
// pixel is predicted from its current (already marked) causal neighbors, so
// which pixels land on a zero bin depends on the bits written before them.
Simulation simulate(const BlockBuffer &adjusted, AlgorithmId alg,
                    const HSParams &params, const BitVector &stream) {
  Simulation sim{adjusted, 0, BitVector(adjusted.pixels().size())};
  BlockBuffer &cur = sim.marked;
  const int q = cur.size();
  for (int r = 0; r < q; ++r) {
    for (int c = 0; c < q; ++c) {
      if (is_context(alg, r, c))
        continue;
      const int pred = predict(alg, cur, r, c);
      const int e = cur.at(r, c) - pred;
      if (params.is_zero_bin(e)) {
        sim.skipped.set(static_cast<std::size_t>(r) * q + c, true);
        continue;
      }
      bool bit = false;
      if (params.is_peak(e)) {
        bit = sim.hits < stream.size() && stream[sim.hits];
        ++sim.hits;
      }
      const int y = pred + shift_value(params, e, bit);
      if (y < 0 || y > cur.max_value())
        throw Error(ErrorCode::RangeViolation, "marked sample out of range");
      cur.set(r, c, y);
    }
  }
  return sim;
}

// Moves each zero bin one step away from its peak. Returns false when
// neither side can move.
bool widen(HSParams &p, const BinRange &range) {
  bool moved = false;
  if (p.right && p.right->zero < range.hi) {
    ++p.right->zero;
    moved = true;
  }
  if (p.left && p.left->zero > range.lo) {
    --p.left->zero;
    moved = true;
  }
  return moved;
}

BitVector concat(const BitVector &a, const BitVector &b) {
  BitVector out = a;
  out.append(b);
  return out;
}

std::int64_t block_distortion(const BlockBuffer &cover, const BlockBuffer &marked,
                              const DistortionModel &model) {
  std::int64_t d = 0;
  const auto &a = cover.pixels();
  const auto &b = marked.pixels();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i])
      d += model.cost(a[i], b[i]);
  return d;
}

} // namespace

namespace {

// Finds the longest chunk up to the request that `params` can carry. The
// zero map must equal the set of pixels the embedder skips, and that set
// moves with the stream, so the map and the chunk length are iterated to a
// fixed point. Returns false when the map never settled.
bool search(const BlockBuffer &cover, const BoundaryAdjustment &adj,
            std::uint64_t raw_capacity, const BlockRequest &request,
            const DistortionModel &model, CandidateOutcome &out) {
  const AlgorithmId alg = out.alg;
  BitVector zero_map(cover.pixels().size());
  const int q = cover.size();
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c)
      if (!is_context(alg, r, c) &&
          out.params.is_zero_bin(adj.pixels.at(r, c) - predict(alg, adj.pixels, r, c)))
        zero_map.set(static_cast<std::size_t>(r) * q + c, true);

  BitVector comp = ac_compress(concat(adj.boundary_map, zero_map));
  std::size_t len = request.requested_bits;
  {
    const std::int64_t estimate = static_cast<std::int64_t>(raw_capacity) - 16 -
                                  static_cast<std::int64_t>(comp.size()) -
                                  static_cast<std::int64_t>(request.prefix.size());
    len = std::min<std::size_t>(len, static_cast<std::size_t>(std::max<std::int64_t>(estimate, 0)));
  }

  std::set<std::size_t> tried;
  // Maps visited since the chunk length last changed. The update is
  // deterministic, so meeting one again means the maps cycle.
  std::vector<BitVector> visited{zero_map};
  bool settled = false;
  for (int iter = 0; iter < kMaxSearchIterations; ++iter) {
    if (comp.size() > 0xFFFF)
      return true;
    const std::size_t overhead = 16 + comp.size() + request.prefix.size();
    BitVector stream = frame_block_stream(comp, request.prefix, request.payload,
                                          request.payload_offset, len);
    Simulation sim = simulate(adj.pixels, alg, out.params, stream);
    if (sim.skipped != zero_map) {
      zero_map = std::move(sim.skipped);
      if (visited.size() > kMaxMapChanges ||
          std::find(visited.begin(), visited.end(), zero_map) != visited.end())
        return settled;
      visited.push_back(zero_map);
      comp = ac_compress(concat(adj.boundary_map, zero_map));
      continue;
    }
    tried.insert(len);
    settled = true;
    if (sim.hits < overhead)
      return true;
    const std::size_t cap = sim.hits - overhead;
    if (len <= cap) {
      if (!out.feasible || len > out.chunk_len) {
        out.feasible = true;
        out.chunk_len = len;
        out.net_capacity = static_cast<std::int64_t>(cap);
        out.hits = sim.hits;
        out.maps = LocationMaps{adj.boundary_map, zero_map};
        out.stream = std::move(stream);
        out.distortion = block_distortion(cover, sim.marked, model);
        out.marked = std::move(sim.marked);
      }
      const std::size_t target = std::min(request.requested_bits, cap);
      if (len == target || tried.count(target))
        return true;
      len = target;
      visited.assign(1, zero_map);
    } else {
      if (tried.count(cap))
        return true;
      len = cap;
      visited.assign(1, zero_map);
    }
  }
  return settled;
}

} // namespace

CandidateOutcome evaluate_candidate(const BlockBuffer &cover, AlgorithmId alg,
                                    const BlockRequest &request,
                                    const DistortionModel &model) {
  CandidateOutcome out;
  out.alg = alg;
  if (request.requested_bits > 0 &&
      (request.payload == nullptr ||
       request.payload_offset + request.requested_bits > request.payload->size()))
    throw Error(ErrorCode::BadLength, "request runs past the payload");

  const BoundaryAdjustment adj = build_boundary_map(cover, alg);
  const Peh peh = compute_peh(alg, adj.pixels);
  const BinRange range = bin_range_for(alg, cover.max_value());
  HSParams params;
  try {
    params = select_pairs(peh, range);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::NoCapacity)
      throw;
    out.params = params;
    return out;
  }
  std::uint64_t raw_capacity = 0;
  if (params.right)
    raw_capacity += peh.count(params.right->peak);
  if (params.left)
    raw_capacity += peh.count(params.left->peak);

  // Zero bins next to a busy peak tend to fill and empty as the marked
  // neighbors change. Pushing them outward trades a little distortion for
  // a map that settles.
  for (int shift = 0; shift <= kMaxZeroShifts; ++shift) {
    CandidateOutcome attempt;
    attempt.alg = alg;
    attempt.params = params;
    bool settled = true;
    try {
      settled = search(cover, adj, raw_capacity, request, model, attempt);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::RangeViolation)
        throw;
    }
    if (shift == 0 || attempt.feasible)
      out = std::move(attempt);
    if (out.feasible || settled || !widen(params, range))
      break;
  }
  return out;
}

BlockPlan plan_block(const BlockBuffer &cover, const BlockRequest &request,
                     std::span<const AlgorithmId> candidates,
                     const DistortionModel &model, bool must_embed) {
  BlockPlan plan;
  std::optional<CandidateOutcome> best;
  bool best_carries_all = false;
  for (AlgorithmId alg : candidates) {
    CandidateOutcome outcome = evaluate_candidate(cover, alg, request, model);
    CandidateOutcome summary;
    summary.alg = outcome.alg;
    summary.feasible = outcome.feasible;
    summary.params = outcome.params;
    summary.chunk_len = outcome.chunk_len;
    summary.net_capacity = outcome.net_capacity;
    summary.hits = outcome.hits;
    summary.distortion = outcome.distortion;
    plan.candidates.push_back(std::move(summary));
    if (!outcome.feasible)
      continue;

    const bool carries_all = outcome.chunk_len == request.requested_bits;
    bool take = false;
    if (!best) {
      take = true;
    } else if (carries_all != best_carries_all) {
      take = carries_all;
    } else if (carries_all) {
      take = outcome.distortion < best->distortion;
    } else if (outcome.chunk_len != best->chunk_len) {
      take = outcome.chunk_len > best->chunk_len;
    } else {
      take = outcome.distortion < best->distortion;
    }
    // Candidates are visited in increasing id order, so strict comparisons
    // leave ties with the lower id.
    if (take) {
      best = std::move(outcome);
      best_carries_all = carries_all;
    }
  }

  if (best && (best->chunk_len > 0 || must_embed)) {
    plan.embedded = true;
    plan.alg = best->alg;
    plan.params = best->params;
    plan.maps = std::move(best->maps);
    plan.chunk_offset = request.payload_offset;
    plan.chunk_len = best->chunk_len;
    plan.distortion = best->distortion;
    plan.net_capacity = best->net_capacity;
    plan.stream = std::move(best->stream);
    plan.marked = std::move(best->marked);
  } else if (best) {
    plan.net_capacity = best->net_capacity;
  }
  return plan;
}

LayerPlan plan_layer(const GrayImage &img, const Partition &partition,
                     std::span<const int> perm, const BitVector &payload,
                     const LayerPlanOptions &options) {
  if (perm.size() != partition.block_count())
    throw Error(ErrorCode::BadLength, "permutation size differs from block count");
  if (options.fixed_chunks && options.fixed_chunks->size() != perm.size())
    throw Error(ErrorCode::BadLength, "fixed chunk list size differs from block count");

  LayerPlan layer;
  bool any_embedded = false;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    const auto index = static_cast<std::size_t>(perm[k] - 1);
    const BlockView &view = partition.blocks.at(index);
    const BlockBuffer cover = BlockBuffer::from_image(img, view);

    BlockRequest request;
    request.payload = &payload;
    request.payload_offset = layer.consumed;
    const std::size_t remaining = payload.size() - layer.consumed;
    if (options.fixed_chunks)
      request.requested_bits = std::min((*options.fixed_chunks)[k], remaining);
    else
      request.requested_bits = std::min(remaining, options.max_chunk);
    if (options.prefix_for)
      request.prefix = options.prefix_for(k + 1, !any_embedded);

    const bool must_embed = options.require_carrier && !any_embedded &&
                            request.requested_bits == 0;
    BlockPlan plan =
        plan_block(cover, request, options.candidates, options.model, must_embed);
    layer.evaluations += options.candidates.size();
    plan.block_index = index;
    plan.position = k + 1;
    if (plan.embedded) {
      any_embedded = true;
      layer.consumed += plan.chunk_len;
      layer.total_distortion += plan.distortion;
    }
    if (options.on_plan)
      options.on_plan(plan);
    layer.plans.push_back(std::move(plan));
  }
  return layer;
}

void apply_plan(GrayImage &img, const Partition &partition,
                const LayerPlan &plan) {
  for (const BlockPlan &p : plan.plans)
    if (p.embedded)
      p.marked->write_to(img, partition.blocks.at(p.block_index));
}

} // namespace erdh
