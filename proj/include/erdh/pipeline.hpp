#pragma once

#include "erdh/bitcodec.hpp"
#include "erdh/image.hpp"
#include "erdh/optimizer.hpp"
#include "erdh/predictors.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace erdh {

inline constexpr std::size_t kAuxFootprintBits = kAuxHeaderBits + kBlockRecordBits;
inline constexpr int kAutoGridMin = 2;
inline constexpr int kAutoGridMax = 8;

struct LayerConfig {
  int t_border = 1;
  std::optional<int> m_grid;  // nullopt sweeps kAutoGridMin..kAutoGridMax
  std::uint64_t perm_seed = 0;
  BitVector payload;
  std::uint8_t layer_index = 1;
  /// Embed the longest prefix that fits instead of failing with
  /// PayloadTooLarge.
  bool partial = false;
  std::vector<AlgorithmId> candidates{kAllAlgorithms.begin(),
                                      kAllAlgorithms.end()};
};

struct LayerReport {
  std::size_t pure_bits = 0;
  std::size_t side_info_bits = 0;  // in-band framing plus the aux footprint
  std::size_t embedded_bits = 0;   // bits physically carried by blocks
  double psnr_db = 0.0;
  double mse = 0.0;
  std::array<std::size_t, 4> alg_counts{};  // indexed by AlgorithmId
  std::size_t skipped = 0;
  int m_used = 0;
  int t_border = 0;
  std::uint8_t layer_index = 1;
  std::size_t evaluations = 0;
  std::vector<BlockPlan> plans;  // processing order; buffers and streams dropped
};

struct EmbedResult {
  GrayImage marked;
  LayerReport report;
};

struct ExtractResult {
  GrayImage cover;
  BitVector payload;
  LayerReport report;
};

/// Embeds one layer. The image must be 8-bit and leave at least 161 border
/// pixels; the border keeps a 96-bit header and a 65-bit record slot in its
/// LSBs, chained through the blocks' in-band streams.
EmbedResult embed_layer(const GrayImage &img, const LayerConfig &cfg);

/// Inverse of embed_layer; recovers the layer input bit-exactly.
ExtractResult extract_layer(const GrayImage &marked);

struct MessageResult {
  GrayImage marked;
  std::vector<LayerReport> reports;
};

/// Embeds `payload` over up to `max_layers` layers, rotating the marked
/// image by 90 degrees before every layer after the first. `cfg.payload` and
/// `cfg.layer_index` are ignored. With `cfg.partial` embedding stops at
/// `max_layers` or at the first later layer that cannot carry data;
/// otherwise leftover bits raise PayloadTooLarge.
MessageResult embed_message(const GrayImage &img, const BitVector &payload,
                            const LayerConfig &cfg, int max_layers);

struct MessageExtraction {
  GrayImage original;
  BitVector payload;
  std::vector<LayerReport> reports;  // last layer first
};

MessageExtraction extract_message(const GrayImage &marked);

/// First `count` border positions of a partition with border `t`, in raster
/// order.
std::vector<Position> aux_positions(int height, int width, int t_border,
                                    std::size_t count);

} // namespace erdh
