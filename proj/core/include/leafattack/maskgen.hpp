#pragma once

#include <optional>
#include <string>

#include "leafattack/edgeops.hpp"
#include "leafattack/raster.hpp"

namespace leafattack {

/// Edge-detection parameters shared by mask generation and edge metrics.
struct EdgeParams {
  double sigma = 1.4;
  double canny_low = 50.0;
  double canny_high = 150.0;
  int dilate_radius = 1;
  int dilate_iterations = 2;
  int close_radius = 2;
  /// Erode the filled silhouette by dilate_radius * dilate_iterations so the
  /// mask boundary sits on the detected outline instead of the outer edge of
  /// the thickened outline.
  bool shrink_to_outline = true;

  CannyThresholds canny_thresholds() const { return {canny_low, canny_high, sigma}; }
  void validate() const;

  bool operator==(const EdgeParams&) const = default;
};

/// grayscale -> blur -> canny -> dilate -> close -> largest filled contour.
///
/// Throws ErrorKind::MaskGeneration with a message prefixed by the failing
/// stage ("canny: no edges", "contour: ...").
BinaryMask generate_leaf_mask(const RasterImage& leaf_rgb, const EdgeParams& params = {});

LeafAsset make_leaf_asset(LeafSpecies species, const std::string& image_path,
                          const std::optional<std::string>& mask_path,
                          const EdgeParams& params = {});

}  // namespace leafattack
