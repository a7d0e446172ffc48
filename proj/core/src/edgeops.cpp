#include "leafattack/edgeops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "leafattack/error.hpp"

namespace leafattack {

namespace {

// Reflect-101: ... 2 1 | 0 1 2 ... n-1 | n-2 ...
int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

void require_gray(const RasterImage& img, const char* op) {
  if (img.channels() != 1) {
    throw Error(ErrorKind::InvalidInput, std::string(op) + " expects a grayscale image");
  }
}

constexpr std::int64_t kFixedOne = 1 << 16;

std::vector<std::int64_t> quantized_kernel(const std::vector<double>& weights) {
  std::vector<std::int64_t> q(weights.size());
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    q[i] = std::llround(weights[i] * static_cast<double>(kFixedOne));
    sum += q[i];
  }
  q[weights.size() / 2] += kFixedOne - sum;
  return q;
}

}  // namespace

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::InvalidParameter, "gaussian sigma must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    w[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : w) v /= sum;
  return w;
}

RasterImage gaussian_blur(const RasterImage& gray, double sigma) {
  require_gray(gray, "gaussian_blur");
  const auto kernel = quantized_kernel(gaussian_kernel(sigma));
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = gray.width();
  const int h = gray.height();

  std::vector<std::int64_t> horizontal(gray.pixel_count());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int64_t acc = 0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] * gray.at(reflect101(x + k, w), y);
      }
      horizontal[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = acc;
    }
  }

  RasterImage out(w, h, 1);
  constexpr std::int64_t kHalf = std::int64_t{1} << 31;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int64_t acc = 0;
      for (int k = -radius; k <= radius; ++k) {
        const int sy = reflect101(y + k, h);
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               horizontal[static_cast<std::size_t>(sy) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
      }
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp<std::int64_t>((acc + kHalf) >> 32, 0, 255));
    }
  }
  return out;
}

GradientField sobel(const RasterImage& gray) {
  require_gray(gray, "sobel");
  const int w = gray.width();
  const int h = gray.height();
  if (w < 3 || h < 3) {
    throw Error(ErrorKind::InvalidInput, "sobel requires an image of at least 3x3");
  }
  GradientField g;
  g.width = w;
  g.height = h;
  g.gx.resize(gray.pixel_count());
  g.gy.resize(gray.pixel_count());
  g.magnitude.resize(gray.pixel_count());
  for (int y = 0; y < h; ++y) {
    const int ym = reflect101(y - 1, h);
    const int yp = reflect101(y + 1, h);
    for (int x = 0; x < w; ++x) {
      const int xm = reflect101(x - 1, w);
      const int xp = reflect101(x + 1, w);
      const int tl = gray.at(xm, ym), tc = gray.at(x, ym), tr = gray.at(xp, ym);
      const int ml = gray.at(xm, y), mr = gray.at(xp, y);
      const int bl = gray.at(xm, yp), bc = gray.at(x, yp), br = gray.at(xp, yp);
      const int gx = (tr + 2 * mr + br) - (tl + 2 * ml + bl);
      const int gy = (bl + 2 * bc + br) - (tl + 2 * tc + tr);
      const std::size_t i = g.index(x, y);
      g.gx[i] = gx;
      g.gy[i] = gy;
      g.magnitude[i] = std::sqrt(static_cast<double>(gx) * gx + static_cast<double>(gy) * gy);
    }
  }
  return g;
}

GradientField canny_gradient(const RasterImage& gray, double sigma) {
  return sobel(gaussian_blur(gray, sigma));
}

EdgeMap canny(const RasterImage& gray, const CannyThresholds& t) {
  require_gray(gray, "canny");
  if (!(t.low >= 0.0) || !(t.high <= 1020.0)) {
    throw Error(ErrorKind::InvalidParameter, "canny thresholds must satisfy 0 <= low < high <= 1020");
  }
  if (!(t.low < t.high)) {
    throw Error(ErrorKind::InvalidParameter, "canny low threshold must be below high threshold");
  }
  const GradientField g = canny_gradient(gray, t.sigma);
  const int w = g.width;
  const int h = g.height;

  auto mag = [&](int x, int y) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
    return g.magnitude[g.index(x, y)];
  };

  constexpr double kTan22 = 0.41421356237309503;  // tan(22.5 deg)
  constexpr double kTan67 = 2.4142135623730949;   // tan(67.5 deg)

  // 0 = not a candidate, 1 = weak, 2 = strong.
  std::vector<std::uint8_t> state(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = g.index(x, y);
      const double m = g.magnitude[i];
      if (m < t.low || m == 0.0) continue;
      const double ax = std::abs(g.gx[i]);
      const double ay = std::abs(g.gy[i]);
      int dx = 0, dy = 0;
      if (ay <= ax * kTan22) {
        dx = 1;
      } else if (ay >= ax * kTan67) {
        dy = 1;
      } else if ((g.gx[i] > 0) == (g.gy[i] > 0)) {
        dx = 1;
        dy = 1;
      } else {
        dx = -1;
        dy = 1;
      }
      // Strict on one side so plateaus of equal magnitude yield one pixel.
      if (!(m > mag(x - dx, y - dy) && m >= mag(x + dx, y + dy))) continue;
      state[i] = m >= t.high ? 2 : 1;
    }
  }

  EdgeMap edges(w, h);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (state[g.index(x, y)] != 2 || edges.get(x, y)) continue;
      edges.set(x, y, true);
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int ny = cy - 1; ny <= cy + 1; ++ny) {
          for (int nx = cx - 1; nx <= cx + 1; ++nx) {
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || edges.get(nx, ny)) continue;
            if (state[g.index(nx, ny)] == 0) continue;
            edges.set(nx, ny, true);
            stack.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  return edges;
}

namespace {

BinaryMask dilate_once(const BinaryMask& mask, int radius) {
  const int w = mask.width();
  const int h = mask.height();
  // Row pass then column pass with running counts over the window.
  BinaryMask rows(w, h);
  for (int y = 0; y < h; ++y) {
    int count = 0;
    for (int x = 0; x <= std::min(radius - 1, w - 1); ++x) count += mask.get(x, y);
    for (int x = 0; x < w; ++x) {
      if (x + radius < w) count += mask.get(x + radius, y);
      if (x - radius - 1 >= 0) count -= mask.get(x - radius - 1, y);
      rows.set(x, y, count > 0);
    }
  }
  BinaryMask out(w, h);
  for (int x = 0; x < w; ++x) {
    int count = 0;
    for (int y = 0; y <= std::min(radius - 1, h - 1); ++y) count += rows.get(x, y);
    for (int y = 0; y < h; ++y) {
      if (y + radius < h) count += rows.get(x, y + radius);
      if (y - radius - 1 >= 0) count -= rows.get(x, y - radius - 1);
      out.set(x, y, count > 0);
    }
  }
  return out;
}

void check_morph_params(int radius, int iterations) {
  if (radius < 1) throw Error(ErrorKind::InvalidParameter, "morphology radius must be >= 1");
  if (iterations < 1) throw Error(ErrorKind::InvalidParameter, "morphology iterations must be >= 1");
}

}  // namespace

BinaryMask dilate(const BinaryMask& mask, int radius, int iterations) {
  check_morph_params(radius, iterations);
  BinaryMask out = mask;
  for (int i = 0; i < iterations; ++i) out = dilate_once(out, radius);
  return out;
}

BinaryMask erode(const BinaryMask& mask, int radius, int iterations) {
  check_morph_params(radius, iterations);
  return mask_complement(dilate(mask_complement(mask), radius, iterations));
}

BinaryMask close(const BinaryMask& mask, int radius) {
  return erode(dilate(mask, radius), radius);
}

ComponentLabels connected_components(const BinaryMask& mask, Connectivity connectivity) {
  ComponentLabels cl;
  cl.width = mask.width();
  cl.height = mask.height();
  cl.labels.assign(mask.pixel_count(), 0);
  const bool eight = connectivity == Connectivity::Eight;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < cl.height; ++y) {
    for (int x = 0; x < cl.width; ++x) {
      if (!mask.get(x, y) || cl.at(x, y) != 0) continue;
      const std::int32_t id = ++cl.count;
      std::size_t size = 0;
      auto label = [&](int px, int py) {
        cl.labels[static_cast<std::size_t>(py) * static_cast<std::size_t>(cl.width) +
                  static_cast<std::size_t>(px)] = id;
        ++size;
        stack.emplace_back(px, py);
      };
      label(x, y);
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (!eight && dx != 0 && dy != 0) continue;
            const int nx = cx + dx, ny = cy + dy;
            if (!mask.in_bounds(nx, ny) || !mask.get(nx, ny) || cl.at(nx, ny) != 0) continue;
            label(nx, ny);
          }
        }
      }
      cl.sizes.push_back(size);
    }
  }
  return cl;
}

namespace {

struct Box {
  int x0, y0, x1, y1;  // inclusive
  long long area() const { return static_cast<long long>(x1 - x0 + 1) * (y1 - y0 + 1); }
};

std::vector<Box> component_boxes(const ComponentLabels& cl) {
  std::vector<Box> boxes(static_cast<std::size_t>(cl.count),
                         Box{cl.width, cl.height, -1, -1});
  for (int y = 0; y < cl.height; ++y) {
    for (int x = 0; x < cl.width; ++x) {
      const auto id = cl.at(x, y);
      if (id == 0) continue;
      Box& b = boxes[static_cast<std::size_t>(id - 1)];
      b.x0 = std::min(b.x0, x);
      b.y0 = std::min(b.y0, y);
      b.x1 = std::max(b.x1, x);
      b.y1 = std::max(b.y1, y);
    }
  }
  return boxes;
}

// Everything outside a component's bounding box is border-reachable, so the
// flood only needs the box grown by one pixel.
BinaryMask fill_in_box(const ComponentLabels& cl, std::int32_t id, const Box& box) {
  const int x0 = std::max(0, box.x0 - 1), y0 = std::max(0, box.y0 - 1);
  const int x1 = std::min(cl.width - 1, box.x1 + 1), y1 = std::min(cl.height - 1, box.y1 + 1);
  const int bw = x1 - x0 + 1;
  const int bh = y1 - y0 + 1;
  std::vector<std::uint8_t> reached(static_cast<std::size_t>(bw) * static_cast<std::size_t>(bh), 0);
  auto idx = [&](int x, int y) {
    return static_cast<std::size_t>(y - y0) * static_cast<std::size_t>(bw) + static_cast<std::size_t>(x - x0);
  };
  std::vector<std::pair<int, int>> stack;
  auto seed = [&](int x, int y) {
    if (cl.at(x, y) == id || reached[idx(x, y)]) return;
    reached[idx(x, y)] = 1;
    stack.emplace_back(x, y);
  };
  for (int x = x0; x <= x1; ++x) {
    seed(x, y0);
    seed(x, y1);
  }
  for (int y = y0; y <= y1; ++y) {
    seed(x0, y);
    seed(x1, y);
  }
  while (!stack.empty()) {
    const auto [cx, cy] = stack.back();
    stack.pop_back();
    constexpr int kDx[4] = {1, -1, 0, 0};
    constexpr int kDy[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nx = cx + kDx[k], ny = cy + kDy[k];
      if (nx < x0 || ny < y0 || nx > x1 || ny > y1) continue;
      seed(nx, ny);
    }
  }
  BinaryMask out(cl.width, cl.height);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (!reached[idx(x, y)]) out.set(x, y, true);
    }
  }
  return out;
}

}  // namespace

BinaryMask fill_component(const ComponentLabels& labels, std::int32_t component) {
  if (component < 1 || component > labels.count) {
    throw Error(ErrorKind::InvalidParameter, "component id out of range");
  }
  const auto boxes = component_boxes(labels);
  return fill_in_box(labels, component, boxes[static_cast<std::size_t>(component - 1)]);
}

BinaryMask largest_contour_fill(const BinaryMask& edge_mask) {
  const ComponentLabels cl = connected_components(edge_mask, Connectivity::Eight);
  if (cl.count == 0) {
    throw Error(ErrorKind::NoContour, "largest_contour_fill: edge mask has no pixels");
  }
  const auto boxes = component_boxes(cl);
  std::vector<std::int32_t> order(static_cast<std::size_t>(cl.count));
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    return boxes[static_cast<std::size_t>(a - 1)].area() > boxes[static_cast<std::size_t>(b - 1)].area();
  });

  std::int32_t best_id = 0;
  std::size_t best_area = 0;
  BinaryMask best;
  for (const std::int32_t id : order) {
    const Box& box = boxes[static_cast<std::size_t>(id - 1)];
    const auto bound = static_cast<std::size_t>(box.area());
    // The filled region never leaves the bounding box.
    if (best_id != 0 && (bound < best_area || (bound == best_area && id > best_id))) continue;
    BinaryMask filled = fill_in_box(cl, id, box);
    const std::size_t area = filled.area();
    if (best_id == 0 || area > best_area || (area == best_area && id < best_id)) {
      best_id = id;
      best_area = area;
      best = std::move(filled);
    }
  }
  return best;
}

}  // namespace leafattack
