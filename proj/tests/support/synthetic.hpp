#pragma once

// Synthetic fixtures and independent oracles shared by the unit and
// acceptance suites. Nothing here calls into the code paths it is used to
// check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "leafattack/raster.hpp"

namespace leafattack::testing {

inline RasterImage solid_rgb(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RasterImage img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = r;
      img.at(x, y, 1) = g;
      img.at(x, y, 2) = b;
    }
  }
  return img;
}

inline RasterImage random_rgb(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RasterImage img(w, h, 3);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng());
  return img;
}

inline BinaryMask mask_from(int w, int h, const std::function<bool(double, double)>& inside) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m.set(x, y, inside(x, y));
  }
  return m;
}

/// Pixel centers inside the axis-aligned ellipse.
inline BinaryMask ellipse_mask(int w, int h, double cx, double cy, double ax, double ay) {
  return mask_from(w, h, [=](double x, double y) {
    const double dx = (x - cx) / ax, dy = (y - cy) / ay;
    return dx * dx + dy * dy <= 1.0;
  });
}

inline BinaryMask rect_mask(int w, int h, int x0, int y0, int rw, int rh) {
  return mask_from(w, h, [=](double x, double y) { return x >= x0 && x < x0 + rw && y >= y0 && y < y0 + rh; });
}

/// Even-odd point-in-polygon test.
inline bool point_in_polygon(const std::vector<std::pair<double, double>>& poly, double px, double py) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto [xi, yi] = poly[i];
    const auto [xj, yj] = poly[j];
    if ((yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi) inside = !inside;
  }
  return inside;
}

/// Five-lobed star-like leaf outline: radius oscillates between r_in and r_out.
inline std::vector<std::pair<double, double>> lobed_polygon(double cx, double cy, double r_in, double r_out,
                                                            int lobes = 5, int samples = 180) {
  std::vector<std::pair<double, double>> poly;
  for (int i = 0; i < samples; ++i) {
    const double t = 2.0 * std::numbers::pi * i / samples;
    const double r = r_in + (r_out - r_in) * 0.5 * (1.0 + std::cos(lobes * t));
    poly.emplace_back(cx + r * std::cos(t), cy + r * std::sin(t));
  }
  return poly;
}

inline BinaryMask polygon_mask(int w, int h, const std::vector<std::pair<double, double>>& poly) {
  return mask_from(w, h, [&](double x, double y) { return point_in_polygon(poly, x, y); });
}

/// Mask drawn as a dark shape on a white background.
inline RasterImage render_dark_on_white(const BinaryMask& m, std::uint8_t dark = 40) {
  RasterImage img(m.width(), m.height(), 3, 255);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y)) continue;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = dark;
    }
  }
  return img;
}

inline BinaryMask random_mask(int w, int h, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m.set(x, y, static_cast<double>(rng() >> 11) * 0x1.0p-53 < density);
  }
  return m;
}

/// Recursive flood fill; returns the partition of set pixels into components.
inline std::set<std::set<std::pair<int, int>>> flood_fill_partition(const BinaryMask& m, bool eight) {
  std::vector<std::vector<int>> seen(static_cast<std::size_t>(m.height()), std::vector<int>(static_cast<std::size_t>(m.width()), 0));
  std::set<std::set<std::pair<int, int>>> parts;
  std::function<void(int, int, std::set<std::pair<int, int>>&)> visit = [&](int x, int y, auto& comp) {
    if (x < 0 || y < 0 || x >= m.width() || y >= m.height()) return;
    if (!m.get(x, y) || seen[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)]) return;
    seen[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = 1;
    comp.insert({x, y});
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if ((dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0)) continue;
        visit(x + dx, y + dy, comp);
      }
    }
  };
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y) || seen[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)]) continue;
      std::set<std::pair<int, int>> comp;
      visit(x, y, comp);
      parts.insert(std::move(comp));
    }
  }
  return parts;
}

// Leaf-silhouette fixtures on a 128x128 canvas.
inline BinaryMask leaf_ellipse_truth() { return ellipse_mask(128, 128, 63.5, 63.5, 40, 24); }
inline BinaryMask leaf_square_truth() { return rect_mask(128, 128, 34, 34, 60, 60); }
inline BinaryMask leaf_lobed_truth() { return polygon_mask(128, 128, lobed_polygon(63.5, 63.5, 30, 50)); }

inline int count_components_oracle(const BinaryMask& m, bool eight) {
  return static_cast<int>(flood_fill_partition(m, eight).size());
}

}  // namespace leafattack::testing
