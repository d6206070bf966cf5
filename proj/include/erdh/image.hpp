#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

namespace erdh {

/// Grayscale raster with `bit_depth` bits per sample, stored row-major.
class GrayImage {
public:
  GrayImage() = default;
  GrayImage(int width, int height, int bit_depth);
  GrayImage(int width, int height, int bit_depth, std::vector<int> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int bit_depth() const noexcept { return bit_depth_; }
  int max_value() const noexcept { return (1 << bit_depth_) - 1; }
  std::size_t size() const noexcept { return samples_.size(); }

  int at(int row, int col) const { return samples_[index(row, col)]; }
  void set(int row, int col, int value);

  std::span<const int> samples() const noexcept { return samples_; }

  bool operator==(const GrayImage &) const = default;

private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  int bit_depth_ = 8;
  std::vector<int> samples_;
};

// Binary (P5) and ASCII (P2) PGM. Depth is 8 when maxval <= 255, else 16.
GrayImage load_pgm(const std::filesystem::path &path);
void store_pgm(const GrayImage &img, const std::filesystem::path &path);

/// Sum of squared sample differences. Throws ShapeMismatch.
std::int64_t squared_error(const GrayImage &a, const GrayImage &b);
double mse(const GrayImage &a, const GrayImage &b);

/// Returns +infinity when the images are identical.
double psnr(const GrayImage &a, const GrayImage &b);
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// Clockwise quarter turn: out(i, j) = in(h - 1 - j, i).
GrayImage rotate90(const GrayImage &img);
/// Counter-clockwise quarter turn, the inverse of rotate90.
GrayImage rotate270(const GrayImage &img);

} // namespace erdh
