#include "erdh/bench.hpp"

#include "erdh/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <future>
#include <string>

namespace erdh {

std::string_view to_string(SweepMode mode) {
  switch (mode) {
  case SweepMode::Ensemble: return "ENSEMBLE";
  case SweepMode::ForceA0: return "FORCE_A0";
  case SweepMode::ForceA1: return "FORCE_A1";
  case SweepMode::ForceA2: return "FORCE_A2";
  case SweepMode::ForceA3: return "FORCE_A3";
  }
  return "?";
}

SweepMode parse_mode(std::string_view text) {
  std::string s(text);
  for (char &ch : s)
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "ensemble") return SweepMode::Ensemble;
  if (s == "a0" || s == "force_a0") return SweepMode::ForceA0;
  if (s == "a1" || s == "force_a1") return SweepMode::ForceA1;
  if (s == "a2" || s == "force_a2") return SweepMode::ForceA2;
  if (s == "a3" || s == "force_a3") return SweepMode::ForceA3;
  throw Error(ErrorCode::FieldOutOfRange, "unknown mode '" + std::string(text) + "'");
}

std::vector<AlgorithmId> candidates_for(SweepMode mode) {
  switch (mode) {
  case SweepMode::ForceA0: return {AlgorithmId::Zero};
  case SweepMode::ForceA1: return {AlgorithmId::NeighborMean};
  case SweepMode::ForceA2: return {AlgorithmId::SecondOrder};
  case SweepMode::ForceA3: return {AlgorithmId::SideMatch};
  case SweepMode::Ensemble: break;
  }
  return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
}

BitVector random_bits(std::uint64_t seed, std::size_t count) {
  XorShift64Star rng(seed);
  BitVector bits;
  bits.reserve(count);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0)
      word = rng.next();
    bits.push_back((word >> (63 - i % 64)) & 1);
  }
  return bits;
}

namespace {

GrayImage unrotate(GrayImage img, int quarter_turns) {
  for (int i = 0; i < quarter_turns % 4; ++i)
    img = rotate270(img);
  return img;
}

// Once a layer cannot carry data the series is exhausted; the remaining
// layers are reported with no new bits and the image left as it is.
std::vector<SweepRow> run_series(const GrayImage &cover, const SweepOptions &opts,
                                 SweepMode mode) {
  std::vector<SweepRow> rows;
  const std::size_t area = cover.size();
  GrayImage current = cover;
  BitVector sent;
  std::size_t cumulative = 0;
  int embedded_layers = 0;
  bool exhausted = false;
  for (int layer = 1; layer <= opts.layers; ++layer) {
    SweepRow row;
    row.image_name = opts.image_name;
    row.layer = layer;
    row.mode = mode;
    if (!exhausted) {
      LayerConfig cfg;
      cfg.t_border = opts.t_border;
      cfg.m_grid = opts.m_grid;
      cfg.perm_seed = opts.seed;
      cfg.layer_index = static_cast<std::uint8_t>(layer);
      cfg.partial = true;
      cfg.candidates = candidates_for(mode);
      cfg.payload = random_bits(opts.seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(layer)),
                                area);
      const GrayImage input = layer == 1 ? current : rotate90(current);
      try {
        EmbedResult r = embed_layer(input, cfg);
        cumulative += r.report.pure_bits;
        sent.append(cfg.payload.slice(0, r.report.pure_bits));
        current = std::move(r.marked);
        embedded_layers = layer;
        row.m_used = r.report.m_used;
        row.alg_counts = r.report.alg_counts;
        row.skipped = r.report.skipped;
        row.pure_bits = r.report.pure_bits;
        row.side_info_bits = r.report.side_info_bits;
        row.embedded_bits = r.report.embedded_bits;
        row.evaluations = r.report.evaluations;
      } catch (const Error &e) {
        if (e.code() != ErrorCode::PayloadTooLarge)
          throw;
        exhausted = true;
      }
    }
    if (exhausted) {
      row.m_used = rows.empty() ? opts.m_grid.value_or(kAutoGridMin) : rows.back().m_used;
      row.skipped = static_cast<std::size_t>(row.m_used) * row.m_used;
      row.side_info_bits = kAuxFootprintBits;
    }
    row.block_count = static_cast<std::size_t>(row.m_used) * row.m_used;
    row.cumulative_rate_bpp = static_cast<double>(cumulative) / static_cast<double>(area);
    const GrayImage upright = unrotate(current, std::max(embedded_layers - 1, 0));
    row.psnr_db = psnr(cover, upright);
    if (opts.verify) {
      bool ok = upright == cover;
      if (embedded_layers > 0) {
        const MessageExtraction x = extract_message(current);
        ok = x.original == cover && x.payload == sent;
      }
      if (!ok)
        throw Error(ErrorCode::InconsistentState,
                    "verification failed at layer " + std::to_string(layer) +
                        " in mode " + std::string(to_string(mode)));
      row.verified = true;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace

std::vector<SweepRow> run_sweep(const GrayImage &cover, const SweepOptions &opts) {
  if (opts.layers < 1)
    throw Error(ErrorCode::FieldOutOfRange, "layers must be >= 1");
  std::vector<SweepMode> modes = opts.modes;
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());

  std::vector<std::vector<SweepRow>> series(modes.size());
  if (opts.parallel) {
    std::vector<std::future<std::vector<SweepRow>>> jobs;
    for (SweepMode mode : modes)
      jobs.push_back(std::async(std::launch::async, run_series, std::cref(cover),
                                std::cref(opts), mode));
    for (std::size_t i = 0; i < jobs.size(); ++i)
      series[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < modes.size(); ++i)
      series[i] = run_series(cover, opts, modes[i]);
  }
  std::vector<SweepRow> rows;
  for (auto &s : series)
    for (auto &r : s)
      rows.push_back(std::move(r));
  return rows;
}

void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows) {
  os << "image_name,layer,m_used,cumulative_rate_bpp,psnr_db,a0,a1,a2,a3,skipped,mode\n";
  char buf[64];
  for (const SweepRow &r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.cumulative_rate_bpp);
    os << r.image_name << ',' << r.layer << ',' << r.m_used << ',' << buf << ',';
    if (std::isinf(r.psnr_db)) {
      os << "inf";
    } else {
      std::snprintf(buf, sizeof buf, "%.4f", r.psnr_db);
      os << buf;
    }
    for (std::size_t c : r.alg_counts)
      os << ',' << c;
    os << ',' << r.skipped << ',' << to_string(r.mode) << '\n';
  }
}

std::array<std::size_t, 5> AlgMap::counts() const {
  std::array<std::size_t, 5> n{};
  for (int code : codes)
    ++n[static_cast<std::size_t>(code)];
  return n;
}

std::string AlgMap::text() const {
  std::string s;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      if (c)
        s += ' ';
      s += static_cast<char>('0' + at(r, c));
    }
    s += '\n';
  }
  return s;
}

GrayImage AlgMap::image(int cell) const {
  static constexpr int kLevels[5] = {0, 64, 128, 192, 255};
  GrayImage img(m * cell, m * cell, 8);
  for (int r = 0; r < m * cell; ++r)
    for (int c = 0; c < m * cell; ++c)
      img.set(r, c, kLevels[at(r / cell, c / cell)]);
  return img;
}

AlgMap render_alg_map(const std::vector<BlockPlan> &plans,
                      const Partition &partition) {
  AlgMap map;
  map.m = partition.m_grid;
  map.codes.assign(partition.block_count(), 0);
  for (const BlockPlan &p : plans)
    if (p.embedded)
      map.codes.at(p.block_index) = 1 + static_cast<int>(p.alg);
  return map;
}

} // namespace erdh
