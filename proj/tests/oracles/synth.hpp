#pragma once

// Synthetic covers shared by the unit and acceptance tests.

#include "erdh/image.hpp"
#include "erdh/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace synth {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::uint64_t next() { return g_.next(); }
  int uniform(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double normal() {
    const double u = std::max(unit(), 1e-300);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * unit());
  }

private:
  erdh::XorShift64Star g_;
};

inline erdh::GrayImage constant(int w, int h, int v) {
  return erdh::GrayImage(w, h, 8, std::vector<int>(static_cast<std::size_t>(w) * h, v));
}

/// Smooth trigonometric field plus Gaussian noise of the given strength.
inline erdh::GrayImage smooth_noisy(int w, int h, Rng &rng, double noise) {
  const double fx = 0.01 + 0.05 * rng.unit();
  const double fy = 0.01 + 0.05 * rng.unit();
  const double amp = 10 + 40 * rng.unit();
  const double base = 100 + 55 * rng.unit();
  const double gx = (rng.unit() - 0.5) * 0.2;
  const double gy = (rng.unit() - 0.5) * 0.2;
  std::vector<int> px(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double v = base + amp * std::sin(fx * c) * std::cos(fy * r) + gx * c +
                       gy * r + noise * rng.normal();
      px[static_cast<std::size_t>(r) * w + c] = std::clamp(static_cast<int>(std::lround(v)), 0, 255);
    }
  return erdh::GrayImage(w, h, 8, std::move(px));
}

/// Piecewise image: smooth regions, a noisy patch and saturated corners.
inline erdh::GrayImage mixed(int w, int h, Rng &rng) {
  erdh::GrayImage img = smooth_noisy(w, h, rng, 0.3 + 2.0 * rng.unit());
  const int pr = rng.uniform(0, h - 1), pc = rng.uniform(0, w - 1);
  const int ph = rng.uniform(1, std::max(1, h / 3)), pw = rng.uniform(1, std::max(1, w / 3));
  for (int r = pr; r < std::min(h, pr + ph); ++r)
    for (int c = pc; c < std::min(w, pc + pw); ++c)
      img.set(r, c, rng.uniform(0, 255));
  if (rng.uniform(0, 1)) {
    const int s = std::max(1, std::min(w, h) / 6);
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) {
        img.set(r, c, 255);
        img.set(h - 1 - r, w - 1 - c, 0);
      }
  }
  return img;
}

/// Flat tiles a few grey levels apart with light dither; content on which
/// every predictor, including the raw-value one, has capacity.
inline erdh::GrayImage terraced(int w, int h, Rng &rng) {
  const int tile = rng.uniform(8, 40);
  const int base = rng.uniform(30, 200);
  const int step = rng.uniform(1, 6);
  const int levels = rng.uniform(2, 5);
  const int dither = rng.uniform(0, 1);
  std::vector<int> px(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      px[static_cast<std::size_t>(r) * w + c] =
          base + step * ((r / tile + c / tile) % levels) + (dither ? rng.uniform(0, 1) : 0);
  return erdh::GrayImage(w, h, 8, std::move(px));
}

/// Smallest border whose pixel count reaches 161.
inline int min_border(int w, int h) {
  for (int t = 1;; ++t)
    if (static_cast<long>(w) * h - static_cast<long>(w - 2 * t) * (h - 2 * t) >= 161)
      return t;
}

} // namespace synth
