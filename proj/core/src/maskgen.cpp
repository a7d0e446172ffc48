#include "leafattack/maskgen.hpp"

#include "leafattack/error.hpp"
#include "leafattack/image_io.hpp"

namespace leafattack {

void EdgeParams::validate() const {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidParameter, "sigma must be positive");
  if (!(canny_low >= 0.0 && canny_low < canny_high && canny_high <= 1020.0)) {
    throw Error(ErrorKind::InvalidParameter, "canny thresholds must satisfy 0 <= low < high <= 1020");
  }
  if (dilate_radius < 1 || dilate_iterations < 1 || close_radius < 1) {
    throw Error(ErrorKind::InvalidParameter, "morphology radii and iterations must be >= 1");
  }
}

BinaryMask generate_leaf_mask(const RasterImage& leaf_rgb, const EdgeParams& params) {
  if (leaf_rgb.width() < 16 || leaf_rgb.height() < 16) {
    throw Error(ErrorKind::InvalidInput, "leaf image must be at least 16x16");
  }
  params.validate();
  const RasterImage gray = to_grayscale(leaf_rgb);
  const RasterImage blurred = gaussian_blur(gray, params.sigma);
  const EdgeMap edges = canny(blurred, params.canny_thresholds());
  if (edges.area() == 0) {
    throw Error(ErrorKind::MaskGeneration, "canny: no edges");
  }
  const BinaryMask thick = dilate(edges, params.dilate_radius, params.dilate_iterations);
  const BinaryMask closed = close(thick, params.close_radius);

  BinaryMask filled;
  try {
    filled = largest_contour_fill(closed);
  } catch (const Error& e) {
    throw Error(ErrorKind::MaskGeneration, std::string("contour: ") + e.what());
  }
  if (params.shrink_to_outline) {
    filled = erode(filled, params.dilate_radius, params.dilate_iterations);
  }
  if (filled.area() == 0) {
    throw Error(ErrorKind::MaskGeneration, "contour: filled region vanished after outline shrink");
  }
  return filled;
}

LeafAsset make_leaf_asset(LeafSpecies species, const std::string& image_path,
                          const std::optional<std::string>& mask_path, const EdgeParams& params) {
  LeafAsset leaf;
  leaf.species = species;
  leaf.image = read_image(image_path);
  if (leaf.image.channels() == 1) {
    // Grayscale leaves are promoted to RGB so compositing onto RGB signs works.
    RasterImage rgb(leaf.image.width(), leaf.image.height(), 3);
    for (int y = 0; y < rgb.height(); ++y) {
      for (int x = 0; x < rgb.width(); ++x) {
        for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = leaf.image.at(x, y);
      }
    }
    leaf.image = std::move(rgb);
  }
  leaf.mask = mask_path ? read_mask(*mask_path) : generate_leaf_mask(leaf.image, params);
  validate(leaf);
  return leaf;
}

}  // namespace leafattack
