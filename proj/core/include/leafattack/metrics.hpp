#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "leafattack/maskgen.hpp"
#include "leafattack/raster.hpp"

namespace leafattack {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

double distance(const Point2& a, const Point2& b);

enum class OrientationMean {
  /// Plain mean of per-pixel atan2 angles in degrees.
  Arithmetic,
  /// Angle of the summed unit vectors.
  Circular,
};

/// Per-image edge statistics. All optional fields are absent when no edge
/// pixel was found.
struct EdgeMetrics {
  std::size_t edge_length = 0;
  std::optional<double> orientation_deg;
  std::optional<double> intensity;
  std::optional<Point2> center_of_gravity;
  /// 8-connected edge segments; diagnostic only.
  std::size_t components = 0;

  static EdgeMetrics from_values(double edge_length, double orientation, double intensity, Point2 cog);
};

struct MetricsDelta {
  double edge_length_diff = 0.0;
  double edge_length_percent = 0.0;
  double orientation_diff = 0.0;
  /// Orientation difference as a percentage of a full turn (360 degrees).
  double orientation_percent = 0.0;
  double intensity_diff = 0.0;
  double intensity_percent = 0.0;
  double cog_distance = 0.0;
};

/// Canny edges of the grayscale image, restricted to `region` when given.
/// Orientation comes from the pre-suppression Sobel field of the blurred
/// image; intensity is read from the unblurred grayscale.
EdgeMetrics edge_metrics(const RasterImage& img, const std::optional<BinaryMask>& region = std::nullopt,
                         const EdgeParams& params = {},
                         OrientationMean orientation_mean = OrientationMean::Arithmetic);

/// Absolute differences of `adv` against `base`; percentages are relative to
/// the base values. Throws UndefinedPercent when the base has no edges or zero
/// intensity.
MetricsDelta metrics_delta(const EdgeMetrics& base, const EdgeMetrics& adv);

struct CohortRow {
  EdgeMetrics metrics;
  MetricsDelta delta;
  bool success = false;
};

struct CohortAverages {
  std::size_t count = 0;
  double edge_length = 0.0;
  double orientation = 0.0;
  double intensity = 0.0;
  Point2 center_of_gravity;
  MetricsDelta delta;
};

struct CohortSplit {
  std::optional<CohortAverages> successful;
  std::optional<CohortAverages> unsuccessful;
};

/// Means per field. Rows whose metrics lack orientation/intensity/cog are an
/// error; an empty cohort is reported as absent.
CohortSplit cohort_averages(const std::vector<CohortRow>& rows);

}  // namespace leafattack
