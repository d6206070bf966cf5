#include "erdh/pipeline.hpp"

#include "erdh/error.hpp"
#include "erdh/hs_codec.hpp"

#include <algorithm>
#include <string>

namespace erdh {

namespace {

constexpr int kPipelineDepth = 8;

void require_depth(const GrayImage &img) {
  if (img.bit_depth() != kPipelineDepth)
    throw Error(ErrorCode::FieldOutOfRange,
                "pipeline expects 8-bit images, got depth " +
                    std::to_string(img.bit_depth()));
}

BitVector read_lsbs(const GrayImage &img, const std::vector<Position> &pos,
                    std::size_t from, std::size_t count) {
  BitVector bits;
  bits.reserve(count);
  for (std::size_t i = from; i < from + count; ++i)
    bits.push_back(img.at(pos[i].row, pos[i].col) & 1);
  return bits;
}

void write_lsbs(GrayImage &img, const std::vector<Position> &pos,
                std::size_t from, const BitVector &bits) {
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const Position &p = pos[from + i];
    img.set(p.row, p.col, (img.at(p.row, p.col) & ~1) | (bits[i] ? 1 : 0));
  }
}

BlockRecord record_for(const BlockPlan &plan) {
  BlockRecord r;
  r.embedded = true;
  r.alg_id = static_cast<std::uint8_t>(plan.alg);
  if (plan.params.right) {
    r.right_present = true;
    r.peak_right = static_cast<std::int16_t>(plan.params.right->peak);
    r.zero_right = static_cast<std::int16_t>(plan.params.right->zero);
  }
  if (plan.params.left) {
    r.left_present = true;
    r.peak_left = static_cast<std::int16_t>(plan.params.left->peak);
    r.zero_left = static_cast<std::int16_t>(plan.params.left->zero);
  }
  r.position = static_cast<std::uint8_t>(plan.position);
  r.chunk_len = static_cast<std::uint32_t>(plan.chunk_len);
  return r;
}

HSParams params_from(const BlockRecord &r) {
  HSParams p;
  if (r.right_present)
    p.right = PeakZeroPair{r.peak_right, r.zero_right, Side::Right};
  if (r.left_present)
    p.left = PeakZeroPair{r.peak_left, r.zero_left, Side::Left};
  try {
    p.validate();
  } catch (const Error &) {
    throw Error(ErrorCode::CorruptStream, "record holds invalid shift pairs");
  }
  if (p.empty())
    throw Error(ErrorCode::CorruptStream, "record holds no shift pair");
  return p;
}

void fill_report_counts(LayerReport &rep, std::vector<BlockPlan> plans) {
  for (BlockPlan &p : plans) {
    if (p.embedded) {
      ++rep.alg_counts[static_cast<std::size_t>(p.alg)];
      rep.embedded_bits += p.stream.size();
      rep.pure_bits += p.chunk_len;
    } else {
      ++rep.skipped;
    }
    p.stream = BitVector();
    p.marked.reset();
  }
  rep.side_info_bits = rep.embedded_bits - rep.pure_bits + kAuxFootprintBits;
  rep.plans = std::move(plans);
}

EmbedResult embed_fixed(const GrayImage &img, const LayerConfig &cfg, int m) {
  if (m < 2 || m > 15)
    throw Error(ErrorCode::FieldOutOfRange, "grid side must be in 2..15");
  if (cfg.t_border < 1 || cfg.t_border > 255)
    throw Error(ErrorCode::FieldOutOfRange, "border must be in 1..255");
  if (cfg.layer_index < 1)
    throw Error(ErrorCode::FieldOutOfRange, "layer index starts at 1");

  const Partition part = make_partition(img.height(), img.width(), cfg.t_border, m);
  if (part.aux_region.size() < kAuxFootprintBits)
    throw Error(ErrorCode::ImageTooSmall,
                "border holds " + std::to_string(part.aux_region.size()) +
                    " pixels, need " + std::to_string(kAuxFootprintBits));
  const std::vector<int> perm =
      make_permutation(cfg.perm_seed, static_cast<int>(part.block_count()));

  const BitVector s0 = read_lsbs(img, part.aux_region, 0, kAuxFootprintBits);
  const BitVector header_snapshot = s0.slice(0, kAuxHeaderBits);
  BitVector slot = s0.slice(kAuxHeaderBits, kBlockRecordBits);

  LayerPlanOptions opts;
  opts.candidates = cfg.candidates;
  opts.require_carrier = true;
  opts.prefix_for = [&](std::size_t, bool first) {
    BitVector prefix;
    prefix.push_back(first);
    prefix.append(slot);
    if (first)
      prefix.append(header_snapshot);
    return prefix;
  };
  opts.on_plan = [&](const BlockPlan &plan) {
    if (plan.embedded)
      slot = pack_record(record_for(plan));
  };

  LayerPlan plan = plan_layer(img, part, perm, cfg.payload, opts);
  const bool any = std::any_of(plan.plans.begin(), plan.plans.end(),
                               [](const BlockPlan &p) { return p.embedded; });
  if (!any)
    throw Error(ErrorCode::PayloadTooLarge, "no block can carry data");
  if (!cfg.partial && plan.consumed < cfg.payload.size())
    throw Error(ErrorCode::PayloadTooLarge,
                "layer carries " + std::to_string(plan.consumed) + " of " +
                    std::to_string(cfg.payload.size()) + " bits");

  GrayImage marked = img;
  apply_plan(marked, part, plan);
  AuxHeader header;
  header.layer_index = cfg.layer_index;
  header.t_border = static_cast<std::uint8_t>(cfg.t_border);
  header.m_grid = static_cast<std::uint8_t>(m);
  header.perm_seed = cfg.perm_seed;
  write_lsbs(marked, part.aux_region, 0, pack_header(header));
  write_lsbs(marked, part.aux_region, kAuxHeaderBits, slot);

  LayerReport rep;
  rep.m_used = m;
  rep.t_border = cfg.t_border;
  rep.layer_index = cfg.layer_index;
  rep.evaluations = plan.evaluations;
  rep.mse = mse(img, marked);
  rep.psnr_db = psnr(img, marked);
  fill_report_counts(rep, std::move(plan.plans));
  return {std::move(marked), std::move(rep)};
}

struct BlockExtraction {
  BlockBuffer restored;
  BitVector bits;
};

// Predictions only read causal neighbors, which the embedder had already
// marked, so every marked error is available from the marked block alone.
BlockExtraction extract_block(const BlockBuffer &marked, AlgorithmId alg,
                              const HSParams &params,
                              const BitVector *zero_map) {
  BlockExtraction out{marked, {}};
  const int q = marked.size();
  for (int r = 0; r < q; ++r) {
    for (int c = 0; c < q; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * q + c;
      if (is_context(alg, r, c)) {
        if (zero_map && (*zero_map)[idx])
          throw Error(ErrorCode::InconsistentState, "zero map marks a context pixel");
        continue;
      }
      const int pred = predict(alg, marked, r, c);
      const int e = marked.at(r, c) - pred;
      if (zero_map && (*zero_map)[idx]) {
        if (!params.is_zero_bin(e))
          throw Error(ErrorCode::InconsistentState,
                      "zero map marks a pixel outside the zero bins");
        continue;
      }
      const Unshifted u = unshift_value(params, e);
      if (u.bit)
        out.bits.push_back(*u.bit);
      const int x = pred + u.value;
      if (x < 0 || x > marked.max_value())
        throw Error(ErrorCode::CorruptStream, "restored sample out of range");
      out.restored.set(r, c, x);
    }
  }
  return out;
}

BitVector read_exact(BitReader &rd, std::size_t n) {
  return rd.read_bits(n);
}

} // namespace

std::vector<Position> aux_positions(int height, int width, int t_border,
                                    std::size_t count) {
  std::vector<Position> out;
  for (int r = 0; r < height && out.size() < count; ++r) {
    for (int c = 0; c < width && out.size() < count; ++c) {
      const bool interior = r >= t_border && r < height - t_border &&
                            c >= t_border && c < width - t_border;
      if (!interior)
        out.push_back({r, c});
    }
  }
  return out;
}

EmbedResult embed_layer(const GrayImage &img, const LayerConfig &cfg) {
  require_depth(img);
  if (cfg.m_grid)
    return embed_fixed(img, cfg, *cfg.m_grid);

  std::optional<EmbedResult> best;
  std::optional<Error> last_error;
  for (int m = kAutoGridMin; m <= kAutoGridMax; ++m) {
    try {
      EmbedResult r = embed_fixed(img, cfg, m);
      if (!best || r.report.pure_bits > best->report.pure_bits ||
          (r.report.pure_bits == best->report.pure_bits &&
           r.report.mse < best->report.mse))
        best = std::move(r);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::ImageTooSmall &&
          e.code() != ErrorCode::PayloadTooLarge)
        throw;
      last_error = e;
    }
  }
  if (!best)
    throw *last_error;
  return std::move(*best);
}

ExtractResult extract_layer(const GrayImage &marked) {
  require_depth(marked);
  const int h = marked.height();
  const int w = marked.width();

  std::optional<AuxHeader> header;
  for (int t = 1; t <= 255 && h - 2 * t >= 2 && w - 2 * t >= 2; ++t) {
    const auto pos = aux_positions(h, w, t, kAuxHeaderBits);
    if (pos.size() < kAuxHeaderBits)
      continue;
    try {
      const AuxHeader hd = unpack_header(read_lsbs(marked, pos, 0, kAuxHeaderBits));
      if (hd.t_border == t && hd.version == kAuxVersion) {
        header = hd;
        break;
      }
    } catch (const Error &) {
    }
  }
  if (!header)
    throw Error(ErrorCode::BadMagic, "no layer header found");

  Partition part;
  try {
    part = make_partition(h, w, header->t_border, header->m_grid);
  } catch (const Error &) {
    throw Error(ErrorCode::CorruptStream, "header grid does not fit the image");
  }
  if (part.aux_region.size() < kAuxFootprintBits)
    throw Error(ErrorCode::CorruptStream, "border too small for the footprint");
  const std::size_t n = part.block_count();
  const std::vector<int> perm = make_permutation(header->perm_seed, static_cast<int>(n));

  GrayImage cover = marked;
  BlockRecord rec =
      unpack_record(read_lsbs(marked, part.aux_region, kAuxHeaderBits, kBlockRecordBits));
  std::vector<BitVector> chunks;
  LayerReport rep;
  rep.m_used = header->m_grid;
  rep.t_border = header->t_border;
  rep.layer_index = header->layer_index;
  rep.skipped = n;

  std::size_t limit = n + 1;
  while (true) {
    if (!rec.embedded || rec.position < 1 || rec.position >= limit ||
        rec.alg_id > 3)
      throw Error(ErrorCode::CorruptStream, "broken record chain");
    limit = rec.position;
    const auto alg = static_cast<AlgorithmId>(rec.alg_id);
    const HSParams params = params_from(rec);
    const BlockView &view = part.blocks[static_cast<std::size_t>(perm[rec.position - 1] - 1)];
    const BlockBuffer block = BlockBuffer::from_image(cover, view);
    const std::size_t area = block.pixels().size();

    const BitVector bits = extract_block(block, alg, params, nullptr).bits;
    BitReader rd(bits);
    BitVector maps, snapshot, header_snapshot, chunk;
    bool first = false;
    std::size_t framing = 0;
    try {
      const std::size_t map_len = rd.read_uint(16);
      maps = ac_decompress(read_exact(rd, map_len));
      if (maps.size() != 2 * area)
        throw Error(ErrorCode::CorruptStream, "location maps have the wrong size");
      first = rd.read_bit();
      snapshot = read_exact(rd, kBlockRecordBits);
      if (first)
        header_snapshot = read_exact(rd, kAuxHeaderBits);
      framing = rd.position();
      chunk = read_exact(rd, rec.chunk_len);
    } catch (const Error &e) {
      throw Error(ErrorCode::CorruptStream,
                  std::string("block stream unreadable: ") + e.what());
    }
    while (rd.remaining() > 0)
      if (rd.read_bit())
        throw Error(ErrorCode::CorruptStream, "non-zero padding after chunk");

    const BitVector boundary = maps.slice(0, area);
    const BitVector zero_map = maps.slice(area, area);
    BlockBuffer restored = extract_block(block, alg, params, &zero_map).restored;
    undo_boundary_map(restored, boundary);
    restored.write_to(cover, view);
    write_lsbs(cover, part.aux_region, kAuxHeaderBits, snapshot);

    ++rep.alg_counts[rec.alg_id];
    --rep.skipped;
    rep.pure_bits += rec.chunk_len;
    rep.embedded_bits += framing + rec.chunk_len;
    chunks.push_back(std::move(chunk));

    if (first) {
      write_lsbs(cover, part.aux_region, 0, header_snapshot);
      break;
    }
    rec = unpack_record(snapshot);
  }
  rep.side_info_bits = rep.embedded_bits - rep.pure_bits + kAuxFootprintBits;
  rep.mse = mse(cover, marked);
  rep.psnr_db = psnr(cover, marked);

  BitVector payload;
  for (auto it = chunks.rbegin(); it != chunks.rend(); ++it)
    payload.append(*it);
  return {std::move(cover), std::move(payload), std::move(rep)};
}

MessageResult embed_message(const GrayImage &img, const BitVector &payload,
                            const LayerConfig &cfg, int max_layers) {
  if (max_layers < 1 || max_layers > 255)
    throw Error(ErrorCode::FieldOutOfRange, "layer count must be in 1..255");
  MessageResult out{img, {}};
  std::size_t offset = 0;
  for (int layer = 1;; ++layer) {
    LayerConfig lc = cfg;
    lc.layer_index = static_cast<std::uint8_t>(layer);
    lc.partial = true;
    lc.payload = payload.slice(offset, payload.size() - offset);
    std::optional<EmbedResult> attempt;
    try {
      attempt = embed_layer(out.marked, lc);
    } catch (const Error &e) {
      // A partial message keeps the layers it already has once the image
      // stops yielding capacity.
      if (!cfg.partial || layer == 1 || e.code() != ErrorCode::PayloadTooLarge)
        throw;
      out.marked = rotate270(out.marked);
      break;
    }
    EmbedResult &r = *attempt;
    offset += r.report.pure_bits;
    out.marked = std::move(r.marked);
    out.reports.push_back(std::move(r.report));
    if (offset == payload.size())
      break;
    if (layer == max_layers) {
      if (cfg.partial)
        break;
      throw Error(ErrorCode::PayloadTooLarge,
                  std::to_string(payload.size() - offset) + " bits left after " +
                      std::to_string(max_layers) + " layers");
    }
    out.marked = rotate90(out.marked);
  }
  return out;
}

MessageExtraction extract_message(const GrayImage &marked) {
  MessageExtraction out;
  GrayImage img = marked;
  std::vector<BitVector> parts;
  std::optional<int> expected;
  while (true) {
    ExtractResult r = extract_layer(img);
    const int idx = r.report.layer_index;
    if (expected && idx != *expected)
      throw Error(ErrorCode::CorruptStream, "layer indices out of sequence");
    parts.push_back(std::move(r.payload));
    out.reports.push_back(std::move(r.report));
    if (idx == 1) {
      img = std::move(r.cover);
      break;
    }
    expected = idx - 1;
    img = rotate270(r.cover);
  }
  out.original = std::move(img);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it)
    out.payload.append(*it);
  return out;
}

} // namespace erdh
