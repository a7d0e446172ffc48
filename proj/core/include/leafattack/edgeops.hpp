#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "leafattack/raster.hpp"

namespace leafattack {

/// Sobel response. gx/gy are exact integer sums of the 3x3 kernels; the
/// magnitude is their Euclidean norm.
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> gx;
  std::vector<std::int32_t> gy;
  std::vector<double> magnitude;

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
};

using EdgeMap = BinaryMask;

struct ComponentLabels {
  int width = 0;
  int height = 0;
  /// 0 = background, components numbered 1..count in raster-scan discovery order.
  std::vector<std::int32_t> labels;
  int count = 0;
  /// sizes[k] is the pixel count of component k + 1.
  std::vector<std::size_t> sizes;

  std::int32_t at(int x, int y) const noexcept {
    return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

enum class Connectivity { Four = 4, Eight = 8 };

/// Separable Gaussian, radius ceil(3 sigma), reflect-101 borders.
///
/// The 1-D kernel is quantized to 16-bit fixed point summing to exactly 2^16,
/// and both passes accumulate in integers. This keeps constant images exactly
/// constant and makes the result independent of pass order, so blurring
/// commutes bit-exactly with transposition.
RasterImage gaussian_blur(const RasterImage& gray, double sigma);

/// Normalized real-valued 1-D Gaussian weights, index 0 = -radius.
std::vector<double> gaussian_kernel(double sigma);

GradientField sobel(const RasterImage& gray);

struct CannyThresholds {
  double low = 50.0;
  double high = 150.0;
  double sigma = 1.4;
};

/// Blur, Sobel, 4-direction non-maximum suppression, and 8-connected
/// hysteresis. Thresholds apply to the Sobel magnitude (range 0..1020*sqrt2).
EdgeMap canny(const RasterImage& gray, const CannyThresholds& t);

/// The pre-suppression gradient canny() computes internally (Sobel of the
/// blurred input).
GradientField canny_gradient(const RasterImage& gray, double sigma);

/// Square (2r+1)^2 structuring element. Dilation clips at the canvas edge;
/// erosion treats out-of-canvas pixels as set, so erode(m) is exactly
/// complement(dilate(complement(m))).
BinaryMask dilate(const BinaryMask& mask, int radius, int iterations = 1);
BinaryMask erode(const BinaryMask& mask, int radius, int iterations = 1);
BinaryMask close(const BinaryMask& mask, int radius);

ComponentLabels connected_components(const BinaryMask& mask, Connectivity connectivity);

/// Selects, among the 8-connected components of `edge_mask`, the one whose
/// filled region is largest and returns that region. A component's filled
/// region is the component plus every pixel that a 4-connected flood from the
/// canvas border cannot reach without crossing the component. Ties go to the
/// component discovered first.
BinaryMask largest_contour_fill(const BinaryMask& edge_mask);

/// Filled region of one component of `labels` (see largest_contour_fill).
BinaryMask fill_component(const ComponentLabels& labels, std::int32_t component);

}  // namespace leafattack
