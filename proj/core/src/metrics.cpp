#include "leafattack/metrics.hpp"

#include <cmath>
#include <numbers>

#include "leafattack/edgeops.hpp"
#include "leafattack/error.hpp"

namespace leafattack {

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

EdgeMetrics EdgeMetrics::from_values(double edge_length, double orientation, double intensity, Point2 cog) {
  if (!(edge_length >= 0.0)) throw Error(ErrorKind::InvalidInput, "edge length must be non-negative");
  EdgeMetrics m;
  m.edge_length = static_cast<std::size_t>(std::llround(edge_length));
  if (m.edge_length > 0) {
    m.orientation_deg = orientation;
    m.intensity = intensity;
    m.center_of_gravity = cog;
  }
  return m;
}

EdgeMetrics edge_metrics(const RasterImage& img, const std::optional<BinaryMask>& region,
                         const EdgeParams& params, OrientationMean orientation_mean) {
  params.validate();
  const RasterImage gray = img.channels() == 3 ? to_grayscale(img) : img;
  if (region && (region->width() != gray.width() || region->height() != gray.height())) {
    throw Error(ErrorKind::InvalidInput, "edge_metrics: region dimensions differ from the image");
  }
  EdgeMap edges = canny(gray, params.canny_thresholds());
  if (region) edges = mask_intersection(edges, *region);
  const GradientField grad = canny_gradient(gray, params.sigma);

  EdgeMetrics m;
  const ComponentLabels cl = connected_components(edges, Connectivity::Eight);
  m.components = static_cast<std::size_t>(cl.count);
  for (const std::size_t s : cl.sizes) m.edge_length += s;
  if (m.edge_length == 0) return m;

  double angle_sum = 0.0, cos_sum = 0.0, sin_sum = 0.0;
  double intensity_sum = 0.0, x_sum = 0.0, y_sum = 0.0;
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      if (!edges.get(x, y)) continue;
      const std::size_t i = grad.index(x, y);
      const double a = std::atan2(static_cast<double>(grad.gy[i]), static_cast<double>(grad.gx[i]));
      angle_sum += a;
      cos_sum += std::cos(a);
      sin_sum += std::sin(a);
      intensity_sum += gray.at(x, y);
      x_sum += x;
      y_sum += y;
    }
  }
  const double n = static_cast<double>(m.edge_length);
  constexpr double kDeg = 180.0 / std::numbers::pi;
  m.orientation_deg = orientation_mean == OrientationMean::Arithmetic ? angle_sum / n * kDeg
                                                                      : std::atan2(sin_sum, cos_sum) * kDeg;
  m.intensity = intensity_sum / n;
  m.center_of_gravity = Point2{x_sum / n, y_sum / n};
  return m;
}

MetricsDelta metrics_delta(const EdgeMetrics& base, const EdgeMetrics& adv) {
  if (base.edge_length == 0 || !base.intensity || !base.orientation_deg || !base.center_of_gravity) {
    throw Error(ErrorKind::UndefinedPercent, "metrics_delta: base image has no edges");
  }
  if (adv.edge_length == 0 || !adv.intensity || !adv.orientation_deg || !adv.center_of_gravity) {
    throw Error(ErrorKind::UndefinedPercent, "metrics_delta: adversarial image has no edges");
  }
  if (*base.intensity == 0.0) {
    throw Error(ErrorKind::UndefinedPercent, "metrics_delta: base intensity is zero");
  }
  MetricsDelta d;
  const double base_len = static_cast<double>(base.edge_length);
  d.edge_length_diff = std::abs(static_cast<double>(adv.edge_length) - base_len);
  d.edge_length_percent = 100.0 * d.edge_length_diff / base_len;
  d.orientation_diff = std::abs(*adv.orientation_deg - *base.orientation_deg);
  d.orientation_percent = 100.0 * d.orientation_diff / 360.0;
  d.intensity_diff = std::abs(*adv.intensity - *base.intensity);
  d.intensity_percent = 100.0 * d.intensity_diff / *base.intensity;
  d.cog_distance = distance(*base.center_of_gravity, *adv.center_of_gravity);
  return d;
}

namespace {

CohortAverages average(const std::vector<const CohortRow*>& rows) {
  CohortAverages a;
  a.count = rows.size();
  for (const CohortRow* r : rows) {
    if (!r->metrics.orientation_deg || !r->metrics.intensity || !r->metrics.center_of_gravity) {
      throw Error(ErrorKind::InvalidInput, "cohort_averages: row without edge metrics");
    }
    a.edge_length += static_cast<double>(r->metrics.edge_length);
    a.orientation += *r->metrics.orientation_deg;
    a.intensity += *r->metrics.intensity;
    a.center_of_gravity.x += r->metrics.center_of_gravity->x;
    a.center_of_gravity.y += r->metrics.center_of_gravity->y;
    a.delta.edge_length_diff += r->delta.edge_length_diff;
    a.delta.edge_length_percent += r->delta.edge_length_percent;
    a.delta.orientation_diff += r->delta.orientation_diff;
    a.delta.orientation_percent += r->delta.orientation_percent;
    a.delta.intensity_diff += r->delta.intensity_diff;
    a.delta.intensity_percent += r->delta.intensity_percent;
    a.delta.cog_distance += r->delta.cog_distance;
  }
  const double n = static_cast<double>(rows.size());
  for (double* v : {&a.edge_length, &a.orientation, &a.intensity, &a.center_of_gravity.x,
                    &a.center_of_gravity.y, &a.delta.edge_length_diff, &a.delta.edge_length_percent,
                    &a.delta.orientation_diff, &a.delta.orientation_percent, &a.delta.intensity_diff,
                    &a.delta.intensity_percent, &a.delta.cog_distance}) {
    *v /= n;
  }
  return a;
}

}  // namespace

CohortSplit cohort_averages(const std::vector<CohortRow>& rows) {
  std::vector<const CohortRow*> ok, failed;
  for (const auto& r : rows) (r.success ? ok : failed).push_back(&r);
  CohortSplit split;
  if (!ok.empty()) split.successful = average(ok);
  if (!failed.empty()) split.unsuccessful = average(failed);
  return split;
}

}  // namespace leafattack
