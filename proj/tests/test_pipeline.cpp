#include "erdh/bench.hpp"
#include "erdh/error.hpp"
#include "erdh/pipeline.hpp"

#include "oracles/support.hpp"
#include "oracles/synth.hpp"

#include <doctest.h>

#include <numeric>

using namespace erdh;

namespace {

LayerConfig config(std::uint64_t seed, const BitVector &payload, std::optional<int> m = 4,
                   int t = 1) {
  LayerConfig cfg;
  cfg.perm_seed = seed;
  cfg.payload = payload;
  cfg.m_grid = m;
  cfg.t_border = t;
  return cfg;
}

void check_ledger(const LayerReport &r) {
  CHECK(r.pure_bits + r.side_info_bits == r.embedded_bits + kAuxFootprintBits);
  CHECK(std::accumulate(r.alg_counts.begin(), r.alg_counts.end(), std::size_t{0}) + r.skipped ==
        static_cast<std::size_t>(r.m_used * r.m_used));
}

int max_change(const GrayImage &a, const GrayImage &b) {
  int m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
  return m;
}

} // namespace

TEST_CASE("single layer round trip on random covers") {
  synth::Rng rng(101);
  for (int trial = 0; trial < 12; ++trial) {
    const GrayImage cover = synth::mixed(128, 128, rng);
    const BitVector payload = random_bits(static_cast<std::uint64_t>(trial) + 1, 500);
    const EmbedResult e = embed_layer(cover, config(rng.next(), payload));
    check_ledger(e.report);
    CHECK(e.report.pure_bits == 500);
    CHECK(max_change(cover, e.marked) <= 2);
    CHECK(e.report.psnr_db >= 42.11);
    const ExtractResult x = extract_layer(e.marked);
    REQUIRE(x.cover == cover);
    REQUIRE(x.payload == payload);
    CHECK(x.report.pure_bits == e.report.pure_bits);
    CHECK(x.report.side_info_bits == e.report.side_info_bits);
    CHECK(x.report.alg_counts == e.report.alg_counts);
  }
}

TEST_CASE("only the 161 footprint pixels of the border change") {
  synth::Rng rng(5);
  const GrayImage cover = synth::mixed(96, 80, rng);
  const EmbedResult e = embed_layer(cover, config(3, random_bits(1, 300), 3, 2));
  const Partition part = make_partition(80, 96, 2, 3);
  for (std::size_t i = 0; i < part.aux_region.size(); ++i) {
    const Position &p = part.aux_region[i];
    const int diff = std::abs(e.marked.at(p.row, p.col) - cover.at(p.row, p.col));
    if (i < kAuxFootprintBits)
      CHECK(diff <= 1);
    else
      CHECK(diff == 0);
  }
  for (const Position &p : part.leftover)
    CHECK(e.marked.at(p.row, p.col) == cover.at(p.row, p.col));
  CHECK(extract_layer(e.marked).cover == cover);
}

TEST_CASE("empty payload still round trips") {
  synth::Rng rng(9);
  const GrayImage cover = synth::smooth_noisy(100, 100, rng, 1.0);
  const EmbedResult e = embed_layer(cover, config(77, BitVector()));
  CHECK(e.report.pure_bits == 0);
  const std::size_t carriers = std::accumulate(e.report.alg_counts.begin(),
                                               e.report.alg_counts.end(), std::size_t{0});
  CHECK(carriers == 1);
  check_ledger(e.report);
  const ExtractResult x = extract_layer(e.marked);
  CHECK(x.cover == cover);
  CHECK(x.payload.empty());
}

TEST_CASE("extraction errors") {
  const GrayImage blank = synth::constant(64, 64, 0);
  CHECK(code_of([&] { extract_layer(blank); }) == ErrorCode::BadMagic);

  synth::Rng rng(12);
  const GrayImage cover = synth::smooth_noisy(128, 128, rng, 1.0);
  const BitVector payload = random_bits(4, 800);
  const EmbedResult e = embed_layer(cover, config(8, payload));
  const Partition part = make_partition(128, 128, 1, 4);
  const BlockPlan &first = e.report.plans.front();
  REQUIRE(first.embedded);
  const BlockView &v = part.blocks[first.block_index];

  int detected = 0;
  for (int k = 0; k < 20; ++k) {
    GrayImage t = e.marked;
    const int r = v.row + 1 + k % (v.size - 1), c = v.col + 1 + (k * 7) % (v.size - 1);
    t.set(r, c, t.at(r, c) == 255 ? 254 : t.at(r, c) + 1);
    try {
      const ExtractResult x = extract_layer(t);
      if (!(x.cover == cover) || !(x.payload == payload))
        ++detected;
    } catch (const Error &err) {
      CHECK((err.code() == ErrorCode::CorruptStream || err.code() == ErrorCode::InconsistentState));
      ++detected;
    }
  }
  CHECK(detected == 20);
}

TEST_CASE("embedding errors") {
  synth::Rng rng(14);
  const GrayImage cover = synth::smooth_noisy(64, 64, rng, 1.0);
  CHECK(code_of([&] { embed_layer(cover, config(1, random_bits(1, 60000))); }) ==
        ErrorCode::PayloadTooLarge);
  CHECK(code_of([&] { embed_layer(synth::constant(20, 20, 9), config(1, BitVector(), 2)); }) ==
        ErrorCode::ImageTooSmall);
  CHECK(code_of([&] { embed_layer(GrayImage(64, 64, 16), config(1, BitVector())); }) ==
        ErrorCode::FieldOutOfRange);

  LayerConfig partial = config(1, random_bits(1, 60000), 2);
  partial.partial = true;
  const EmbedResult e = embed_layer(cover, partial);
  CHECK(e.report.pure_bits > 0);
  CHECK(e.report.pure_bits < 60000);
  const ExtractResult x = extract_layer(e.marked);
  CHECK(x.payload == partial.payload.slice(0, e.report.pure_bits));
}

TEST_CASE("multi-layer messages") {
  synth::Rng rng(31);
  const GrayImage cover = synth::smooth_noisy(120, 90, rng, 1.0);

  const BitVector small = random_bits(2, 200);
  const MessageResult one = embed_message(cover, small, config(5, {}), 4);
  CHECK(one.reports.size() == 1);
  CHECK(one.marked.width() == 120);
  const MessageExtraction x1 = extract_message(one.marked);
  CHECK(x1.reports.size() == 1);
  CHECK(x1.original == cover);
  CHECK(x1.payload == small);

  LayerConfig cfg = config(6, {}, 3);
  cfg.partial = true;
  const BitVector big = random_bits(3, 200000);
  const MessageResult four = embed_message(cover, big, cfg, 4);
  REQUIRE(four.reports.size() == 4);
  std::size_t total = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(four.reports[i].layer_index == i + 1);
    check_ledger(four.reports[i]);
    total += four.reports[i].pure_bits;
  }
  const MessageExtraction x4 = extract_message(four.marked);
  REQUIRE(x4.reports.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(x4.reports[i].layer_index == 4 - i);
  CHECK(x4.original == cover);
  CHECK(x4.payload == big.slice(0, total));

  cfg.partial = false;
  CHECK(code_of([&] { embed_message(cover, big, cfg, 2); }) == ErrorCode::PayloadTooLarge);
}

TEST_CASE("automatic grid maximizes pure bits") {
  synth::Rng rng(44);
  const GrayImage cover = synth::smooth_noisy(160, 160, rng, 1.5);
  LayerConfig cfg = config(10, random_bits(5, 40000), std::nullopt);
  cfg.partial = true;
  const EmbedResult best = embed_layer(cover, cfg);
  for (int m = kAutoGridMin; m <= kAutoGridMax; ++m) {
    cfg.m_grid = m;
    try {
      const EmbedResult r = embed_layer(cover, cfg);
      CHECK(r.report.pure_bits <= best.report.pure_bits);
      if (r.report.pure_bits == best.report.pure_bits)
        CHECK(r.report.mse >= best.report.mse);
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::PayloadTooLarge);
    }
  }
  CHECK(extract_layer(best.marked).cover == cover);
}

TEST_CASE("aux positions follow raster order over the border") {
  const auto pos = aux_positions(5, 6, 1, 100);
  CHECK(pos.size() == 5 * 6 - 3 * 4);
  CHECK(pos[6] == Position{1, 0});
  CHECK(pos[7] == Position{1, 5});
  const Partition p = make_partition(5, 6, 1, 2);
  CHECK(pos == p.aux_region);
}
