#pragma once

#include "erdh/image.hpp"
#include "erdh/optimizer.hpp"
#include "erdh/pipeline.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace erdh {

enum class SweepMode { Ensemble, ForceA0, ForceA1, ForceA2, ForceA3 };

inline constexpr std::array<SweepMode, 5> kAllModes{
    SweepMode::Ensemble, SweepMode::ForceA0, SweepMode::ForceA1,
    SweepMode::ForceA2, SweepMode::ForceA3};

std::string_view to_string(SweepMode mode);
/// Accepts "ensemble", "a0".."a3" and the upper-case CSV names.
SweepMode parse_mode(std::string_view text);
std::vector<AlgorithmId> candidates_for(SweepMode mode);

struct SweepRow {
  std::string image_name;
  int layer = 0;
  int m_used = 0;
  double cumulative_rate_bpp = 0.0;
  double psnr_db = 0.0;  // against the original cover
  std::array<std::size_t, 4> alg_counts{};
  std::size_t skipped = 0;
  SweepMode mode = SweepMode::Ensemble;
  std::size_t pure_bits = 0;
  std::size_t side_info_bits = 0;
  std::size_t embedded_bits = 0;
  std::size_t evaluations = 0;
  std::size_t block_count = 0;
  bool verified = false;
};

struct SweepOptions {
  std::string image_name = "image";
  int layers = 1;
  std::vector<SweepMode> modes{kAllModes.begin(), kAllModes.end()};
  std::uint64_t seed = 1;
  std::optional<int> m_grid;  // nullopt sweeps the grid size per layer
  int t_border = 1;
  /// Extract after every layer and throw InconsistentState on a mismatch.
  bool verify = false;
  /// Run modes on separate threads.
  bool parallel = true;
};

/// Embeds as much seeded random payload as fits, layer after layer, for
/// each mode. Every mode yields one row per layer; once a layer cannot
/// carry anything, the rest of that series repeats its last state with no
/// new bits. Rows are ordered by mode, then layer.
std::vector<SweepRow> run_sweep(const GrayImage &cover, const SweepOptions &opts);

/// Seeded payload bits used by the sweep.
BitVector random_bits(std::uint64_t seed, std::size_t count);

void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows);

struct AlgMap {
  int m = 0;
  std::vector<int> codes;  // grid order; 0 skipped, 1 + AlgorithmId otherwise

  int at(int r, int c) const { return codes[static_cast<std::size_t>(r) * m + c]; }
  std::array<std::size_t, 5> counts() const;
  std::string text() const;
  /// Each cell becomes a `cell` x `cell` square at gray 0/64/128/192/255.
  GrayImage image(int cell = 8) const;
};

AlgMap render_alg_map(const std::vector<BlockPlan> &plans,
                      const Partition &partition);

} // namespace erdh
