#pragma once

#include "erdh/image.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

namespace erdh {

/// Candidate embedders. The numeric values are the 2-bit alg_id of a
/// BlockRecord and must not change.
enum class AlgorithmId : std::uint8_t {
  Zero = 0,        // value histogram: prediction fixed at 0
  NeighborMean = 1,
  SecondOrder = 2,
  SideMatch = 3,
};

inline constexpr std::array<AlgorithmId, 4> kAllAlgorithms = {
    AlgorithmId::Zero, AlgorithmId::NeighborMean, AlgorithmId::SecondOrder,
    AlgorithmId::SideMatch};

std::string_view to_string(AlgorithmId alg);

/// Square block in image coordinates.
struct BlockView {
  int row = 0;
  int col = 0;
  int size = 0;

  bool operator==(const BlockView &) const = default;
};

/// Local copy of one block's samples. Predictors only ever see this buffer,
/// so they cannot read pixels of other blocks.
class BlockBuffer {
public:
  BlockBuffer(int size, int max_value);
  static BlockBuffer from_image(const GrayImage &img, const BlockView &block);
  void write_to(GrayImage &img, const BlockView &block) const;

  int size() const noexcept { return size_; }
  int max_value() const noexcept { return max_value_; }
  int at(int r, int c) const { return px_[static_cast<std::size_t>(r) * size_ + c]; }
  void set(int r, int c, int v) { px_[static_cast<std::size_t>(r) * size_ + c] = v; }
  const std::vector<int> &pixels() const noexcept { return px_; }

  bool operator==(const BlockBuffer &) const = default;

private:
  int size_;
  int max_value_;
  std::vector<int> px_;
};

/// First row and column are context for the predictive algorithms; the
/// zero predictor uses every pixel.
bool is_context(AlgorithmId alg, int r, int c);

/// Prediction at local (r, c) from the block's current causal neighbors.
/// Throws ContextUnavailable for context positions of A1..A3.
int predict(AlgorithmId alg, const BlockBuffer &block, int r, int c);
/// Image-coordinate convenience form.
int predict(AlgorithmId alg, const BlockView &block, const GrayImage &img,
            int row, int col);

/// Histogram of values (Zero) or prediction errors over embeddable pixels.
struct Peh {
  std::map<int, std::uint64_t> counts;

  std::uint64_t count(int bin) const {
    const auto it = counts.find(bin);
    return it == counts.end() ? 0 : it->second;
  }
  std::uint64_t total() const;
  int min_bin() const { return counts.begin()->first; }
  int max_bin() const { return counts.rbegin()->first; }
  bool empty() const { return counts.empty(); }

  bool operator==(const Peh &) const = default;
};

/// Errors x - predict(x) in raster order, evaluated on the current buffer.
std::vector<int> prediction_errors(AlgorithmId alg, const BlockBuffer &block);
Peh compute_peh(AlgorithmId alg, const BlockBuffer &block);
Peh compute_peh(AlgorithmId alg, const BlockView &block, const GrayImage &img);

} // namespace erdh
