#include "erdh/predictors.hpp"

#include "erdh/error.hpp"

#include <algorithm>

namespace erdh {

std::string_view to_string(AlgorithmId alg) {
  switch (alg) {
  case AlgorithmId::Zero: return "zero";
  case AlgorithmId::NeighborMean: return "mean";
  case AlgorithmId::SecondOrder: return "second-order";
  case AlgorithmId::SideMatch: return "side-match";
  }
  return "?";
}

BlockBuffer::BlockBuffer(int size, int max_value)
    : size_(size), max_value_(max_value),
      px_(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0) {}

BlockBuffer BlockBuffer::from_image(const GrayImage &img, const BlockView &block) {
  BlockBuffer buf(block.size, img.max_value());
  for (int r = 0; r < block.size; ++r)
    for (int c = 0; c < block.size; ++c)
      buf.set(r, c, img.at(block.row + r, block.col + c));
  return buf;
}

void BlockBuffer::write_to(GrayImage &img, const BlockView &block) const {
  for (int r = 0; r < size_; ++r)
    for (int c = 0; c < size_; ++c)
      img.set(block.row + r, block.col + c, at(r, c));
}

bool is_context(AlgorithmId alg, int r, int c) {
  return alg != AlgorithmId::Zero && (r == 0 || c == 0);
}

namespace {

int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

// First-order error of the second-order predictor, recomputed from the
// current samples so the encoder and a reverse-scan decoder agree.
int first_order_error(const BlockBuffer &b, int r, int c) {
  if (r == 0 || c == 0)
    return 0;
  return b.at(r, c) - floor_div2(b.at(r, c - 1) + b.at(r - 1, c));
}

int median3(int a, int b, int c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

} // namespace

int predict(AlgorithmId alg, const BlockBuffer &b, int r, int c) {
  if (r < 0 || c < 0 || r >= b.size() || c >= b.size())
    throw Error(ErrorCode::ContextUnavailable, "position outside block");
  if (alg == AlgorithmId::Zero)
    return 0;
  if (is_context(alg, r, c))
    throw Error(ErrorCode::ContextUnavailable,
                "first row and column are context only");

  const int left = b.at(r, c - 1);
  const int up = b.at(r - 1, c);
  const int up_left = b.at(r - 1, c - 1);
  switch (alg) {
  case AlgorithmId::NeighborMean: {
    const int up_right = c + 1 < b.size() ? b.at(r - 1, c + 1) : up;
    return (left + up + up_left + up_right + 2) / 4;
  }
  case AlgorithmId::SecondOrder: {
    const int base = floor_div2(left + up);
    const int correction = floor_div2(first_order_error(b, r, c - 1) +
                                      first_order_error(b, r - 1, c));
    return std::clamp(base + correction, 0, b.max_value());
  }
  case AlgorithmId::SideMatch:
    return median3(left, up, left + up - up_left);
  case AlgorithmId::Zero:
    break;
  }
  return 0;
}

int predict(AlgorithmId alg, const BlockView &block, const GrayImage &img,
            int row, int col) {
  const BlockBuffer buf = BlockBuffer::from_image(img, block);
  return predict(alg, buf, row - block.row, col - block.col);
}

std::uint64_t Peh::total() const {
  std::uint64_t n = 0;
  for (const auto &[bin, count] : counts)
    n += count;
  return n;
}

std::vector<int> prediction_errors(AlgorithmId alg, const BlockBuffer &block) {
  std::vector<int> out;
  out.reserve(block.pixels().size());
  for (int r = 0; r < block.size(); ++r)
    for (int c = 0; c < block.size(); ++c)
      if (!is_context(alg, r, c))
        out.push_back(block.at(r, c) - predict(alg, block, r, c));
  return out;
}

Peh compute_peh(AlgorithmId alg, const BlockBuffer &block) {
  Peh peh;
  for (int e : prediction_errors(alg, block))
    ++peh.counts[e];
  return peh;
}

Peh compute_peh(AlgorithmId alg, const BlockView &block, const GrayImage &img) {
  return compute_peh(alg, BlockBuffer::from_image(img, block));
}

} // namespace erdh
