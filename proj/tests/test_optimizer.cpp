#include "erdh/error.hpp"
#include "erdh/optimizer.hpp"

#include "oracles/support.hpp"
#include "oracles/synth.hpp"
#include "oracles/vectors.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace erdh;

namespace {

BlockBuffer ramp_block(int q) {
  BlockBuffer b(q, 255);
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c)
      b.set(r, c, 40 + r + 2 * c);
  return b;
}

// Decodes a candidate's marked block with its own maps, the way an extractor
// would, and returns the restored block and the carried bits.
std::pair<BlockBuffer, BitVector> decode(const CandidateOutcome &o) {
  BlockBuffer cur = *o.marked;
  BitVector bits;
  const int q = cur.size();
  for (int r = q - 1; r >= 0; --r)
    for (int c = q - 1; c >= 0; --c) {
      if (is_context(o.alg, r, c) || o.maps.zero_map[static_cast<std::size_t>(r * q + c)])
        continue;
      const int p = predict(o.alg, cur, r, c);
      const Unshifted u = unshift_value(o.params, cur.at(r, c) - p);
      cur.set(r, c, p + u.value);
    }
  // The extractor reads bits before it knows the maps, so collect them
  // without consulting the zero map.
  BlockBuffer fwd = *o.marked;
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c) {
      if (is_context(o.alg, r, c))
        continue;
      const Unshifted u = unshift_value(o.params, fwd.at(r, c) - predict(o.alg, fwd, r, c));
      if (u.bit)
        bits.push_back(*u.bit);
    }
  undo_boundary_map(cur, o.maps.boundary_map);
  return {cur, bits};
}

} // namespace

TEST_CASE("partition examples") {
  const Partition p = make_partition(512, 512, 1, 8);
  CHECK(p.q == 63);
  CHECK(p.block_count() == 64);
  CHECK(p.aux_region.size() == 2044);
  CHECK(p.blocks[9] == BlockView{1 + 63, 1 + 63, 63});

  const Partition s = make_partition(10, 10, 1, 2);
  CHECK(s.q == 4);
  CHECK(s.block_count() == 4);
  CHECK(s.leftover.empty());

  CHECK(code_of([] { make_partition(6, 6, 1, 8); }) == ErrorCode::ImageTooSmall);
  CHECK(code_of([] { make_partition(20, 20, 1, 1); }) == ErrorCode::ImageTooSmall);
}

TEST_CASE("partition covers every pixel exactly once") {
  synth::Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const int h = rng.uniform(6, 90), w = rng.uniform(6, 90);
    const int t = rng.uniform(1, 3), m = rng.uniform(2, 8);
    if (h - 2 * t < m || w - 2 * t < m) {
      CHECK(code_of([&] { make_partition(h, w, t, m); }) == ErrorCode::ImageTooSmall);
      continue;
    }
    const Partition p = make_partition(h, w, t, m);
    std::vector<int> hits(static_cast<std::size_t>(h * w), 0);
    for (const BlockView &b : p.blocks)
      for (int r = 0; r < b.size; ++r)
        for (int c = 0; c < b.size; ++c) {
          REQUIRE(p.in_interior(b.row + r, b.col + c));
          ++hits[static_cast<std::size_t>((b.row + r) * w + b.col + c)];
        }
    for (const Position &a : p.aux_region)
      ++hits[static_cast<std::size_t>(a.row * w + a.col)];
    for (const Position &a : p.leftover)
      ++hits[static_cast<std::size_t>(a.row * w + a.col)];
    CHECK(std::all_of(hits.begin(), hits.end(), [](int n) { return n == 1; }));
    CHECK(p.block_count() <= static_cast<std::size_t>(((h - 2 * t) / p.q) * ((w - 2 * t) / p.q)));
  }
}

TEST_CASE("xorshift64* and keyed permutation golden vectors") {
  XorShift64Star g(1);
  for (std::uint64_t v : vectors::kXorshiftSeed1)
    CHECK(g.next() == v);
  XorShift64Star z(0), one(1);
  CHECK(z.next() == one.next());

  const auto p = make_permutation(0x0123456789ABCDEFull, 5);
  CHECK(std::equal(p.begin(), p.end(), vectors::kPermGolden.begin()));
  const auto q = make_permutation(42, 16);
  CHECK(std::equal(q.begin(), q.end(), vectors::kPerm42.begin()));

  for (std::uint64_t seed : {0ull, 7ull, 0xFFFFFFFFFFFFFFFFull})
    CHECK(make_permutation(seed, 1) == std::vector<int>{1});
  for (int n = 0; n < 70; ++n) {
    auto v = make_permutation(static_cast<std::uint64_t>(n) * 977, n);
    std::sort(v.begin(), v.end());
    for (int i = 0; i < n; ++i)
      REQUIRE(v[static_cast<std::size_t>(i)] == i + 1);
  }
}

TEST_CASE("candidates decode back to the cover") {
  synth::Rng rng(17);
  const BitVector payload = [&] {
    BitVector b;
    for (int i = 0; i < 4000; ++i)
      b.push_back(rng.uniform(0, 1));
    return b;
  }();
  for (int trial = 0; trial < 40; ++trial) {
    const GrayImage img = synth::mixed(40, 40, rng);
    const BlockBuffer cover = BlockBuffer::from_image(img, BlockView{2, 2, 32});
    BlockRequest req;
    req.payload = &payload;
    req.payload_offset = static_cast<std::size_t>(rng.uniform(0, 100));
    req.requested_bits = static_cast<std::size_t>(rng.uniform(0, 600));
    req.prefix = BitVector(static_cast<std::size_t>(rng.uniform(0, 170)), true);
    for (AlgorithmId alg : kAllAlgorithms) {
      const CandidateOutcome o =
          evaluate_candidate(cover, alg, req, DistortionModel::squared_error());
      if (!o.feasible)
        continue;
      CHECK(o.chunk_len <= req.requested_bits);
      CHECK(static_cast<std::int64_t>(o.chunk_len) <= o.net_capacity);
      const auto [restored, bits] = decode(o);
      REQUIRE(restored == cover);
      REQUIRE(bits.size() == o.hits);
      REQUIRE(bits.slice(0, o.stream.size()) == o.stream);
      CHECK(o.stream.size() ==
            16 + o.stream.read_uint(0, 16) + req.prefix.size() + o.chunk_len);
      std::int64_t d = 0;
      for (std::size_t i = 0; i < cover.pixels().size(); ++i) {
        const int diff = cover.pixels()[i] - o.marked->pixels()[i];
        CHECK(std::abs(diff) <= 2);
        d += diff * diff;
      }
      CHECK(o.distortion == d);
    }
  }
}

TEST_CASE("smooth ramp selects a prediction-based algorithm") {
  const BlockBuffer cover = ramp_block(32);
  BitVector payload(400, true);
  BlockRequest req{&payload, 0, 400, BitVector()};
  const BlockPlan plan =
      plan_block(cover, req, kAllAlgorithms, DistortionModel::squared_error());
  REQUIRE(plan.embedded);
  CHECK(plan.alg != AlgorithmId::Zero);
  CHECK(plan.candidates.size() == 4);
  // The zero predictor's flat value histogram cannot carry the same chunk.
  CHECK(plan.candidates[0].chunk_len < plan.chunk_len);
}

TEST_CASE("saturated and empty requests stay untouched") {
  BlockBuffer white(8, 255);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      white.set(r, c, 255);
  BitVector payload(100, true);
  BlockRequest req{&payload, 0, 100, BitVector(66)};
  const BlockPlan p = plan_block(white, req, kAllAlgorithms, DistortionModel::squared_error());
  CHECK_FALSE(p.embedded);
  CHECK(p.chunk_len == 0);

  const BlockRequest none{&payload, 0, 0, BitVector()};
  const BlockPlan q = plan_block(ramp_block(32), none, kAllAlgorithms,
                                 DistortionModel::squared_error());
  CHECK_FALSE(q.embedded);
  const BlockPlan forced = plan_block(ramp_block(32), none, kAllAlgorithms,
                                      DistortionModel::squared_error(), true);
  CHECK(forced.embedded);
  CHECK(forced.chunk_len == 0);
}

TEST_CASE("layer planning") {
  synth::Rng rng(23);
  const GrayImage img = synth::smooth_noisy(100, 100, rng, 1.0);
  const Partition part = make_partition(100, 100, 2, 3);
  const auto perm = make_permutation(99, 9);

  const LayerPlan empty = plan_layer(img, part, perm, BitVector());
  CHECK(empty.consumed == 0);
  CHECK(empty.total_distortion == 0);
  for (const BlockPlan &p : empty.plans)
    CHECK_FALSE(p.embedded);

  BitVector payload;
  for (int i = 0; i < 3000; ++i)
    payload.push_back(rng.uniform(0, 1));
  const LayerPlan a = plan_layer(img, part, perm, payload);
  const LayerPlan b = plan_layer(img, part, perm, payload);
  CHECK(a.consumed > 0);
  CHECK(a.consumed <= payload.size());
  CHECK(a.evaluations <= 9 * 4);
  REQUIRE(a.plans.size() == b.plans.size());
  std::size_t offset = 0;
  for (std::size_t k = 0; k < a.plans.size(); ++k) {
    CHECK(a.plans[k].stream == b.plans[k].stream);
    CHECK(a.plans[k].alg == b.plans[k].alg);
    CHECK(a.plans[k].position == k + 1);
    CHECK(a.plans[k].block_index == static_cast<std::size_t>(perm[k] - 1));
    if (a.plans[k].embedded) {
      CHECK(a.plans[k].chunk_offset == offset);
      offset += a.plans[k].chunk_len;
    }
  }
  CHECK(offset == a.consumed);

  GrayImage marked = img;
  apply_plan(marked, part, a);
  std::int64_t d = 0;
  for (int r = 0; r < 100; ++r)
    for (int c = 0; c < 100; ++c) {
      const int diff = marked.at(r, c) - img.at(r, c);
      d += diff * diff;
      const bool in_block = std::any_of(part.blocks.begin(), part.blocks.end(), [&](const BlockView &v) {
        return r >= v.row && r < v.row + v.size && c >= v.col && c < v.col + v.size;
      });
      if (!in_block)
        CHECK(diff == 0);
    }
  CHECK(d == a.total_distortion);
}

TEST_CASE("fixed chunks and a custom cost") {
  synth::Rng rng(29);
  const GrayImage img = synth::smooth_noisy(80, 80, rng, 0.5);
  const Partition part = make_partition(80, 80, 2, 2);
  const auto perm = make_permutation(5, 4);
  BitVector payload(400, false);
  LayerPlanOptions opts;
  opts.fixed_chunks = std::vector<std::size_t>{100, 0, 50, 250};
  opts.model.cost = [](int a, int b) { return static_cast<std::int64_t>(std::abs(a - b)); };
  const LayerPlan plan = plan_layer(img, part, perm, payload, opts);
  CHECK(plan.plans[0].chunk_len == 100);
  CHECK_FALSE(plan.plans[1].embedded);
  CHECK(plan.plans[2].chunk_len == 50);
  CHECK(plan.plans[3].chunk_len == 250);

  opts.fixed_chunks = std::vector<std::size_t>{1};
  CHECK(code_of([&] { plan_layer(img, part, perm, payload, opts); }) == ErrorCode::BadLength);
}
