#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace leafattack {

/// 8-bit raster, row-major, channel-interleaved, top-left origin with y
/// increasing downward. Grayscale (1 channel) or RGB (3 channels).
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, int channels, std::uint8_t fill = 0);
  RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  std::uint8_t at(int x, int y, int c = 0) const noexcept {
    return data_[index(x, y, c)];
  }
  std::uint8_t& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  bool operator==(const RasterImage&) const = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Inclusive-exclusive pixel rectangle.
struct PixelBox {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool operator==(const PixelBox&) const = default;
};

/// One boolean per pixel, row-major. Stored as bytes (0/1) so that rows can be
/// addressed as spans.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  bool get(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool value) noexcept { bits_[index(x, y)] = value ? 1 : 0; }
  bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::size_t area() const noexcept;
  /// Tight box around the true pixels; nullopt when the mask is empty.
  std::optional<PixelBox> bounding_box() const noexcept;

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::span<std::uint8_t> bits() noexcept { return bits_; }

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

BinaryMask mask_complement(const BinaryMask& mask);
BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
bool mask_contains(const BinaryMask& outer, const BinaryMask& inner);
/// Intersection over union; 1.0 when both masks are empty.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

enum class LeafSpecies { Maple, Oak, Poplar };

std::string to_string(LeafSpecies species);
/// Case-insensitive; "Polar" is accepted as a spelling of Poplar.
LeafSpecies parse_species(std::string_view text);

struct LeafAsset {
  LeafSpecies species = LeafSpecies::Maple;
  RasterImage image;
  BinaryMask mask;
};

/// Throws InvalidInput if dimensions disagree or the mask is empty.
void validate(const LeafAsset& leaf);

struct SignInstance {
  std::string name;
  RasterImage image;
  BinaryMask sign_mask;
  int true_label = 0;
};

void validate(const SignInstance& sign, std::size_t class_count);

enum class Resample { Bilinear, Nearest };

/// BT.601 luma, rounded to nearest.
RasterImage to_grayscale(const RasterImage& img);

/// Resample with pixel-center alignment. Sample coordinates outside the source
/// are clamped to the edge.
RasterImage scale(const RasterImage& img, int new_width, int new_height, Resample mode);
BinaryMask scale_mask(const BinaryMask& mask, int new_width, int new_height);

struct RotatedPatch {
  RasterImage image;
  BinaryMask mask;
};

/// Rotate image and mask counterclockwise (as displayed) about their common
/// center into a canvas that bounds the rotated rectangle. The image is
/// resampled bilinearly, the mask with nearest neighbour. Canvas pixels that do
/// not map back into the source are black / false.
RotatedPatch rotate(const RasterImage& img, const BinaryMask& mask, double angle_deg);

/// Hard replacement: output = patch where patch_mask is set, base elsewhere.
RasterImage composite(const RasterImage& base, const RasterImage& patch,
                      const BinaryMask& patch_mask, int x, int y);

/// Grayscale rendering of a mask (0 / 255).
RasterImage mask_to_image(const BinaryMask& mask);
/// Pixels at or above `threshold` on channel 0 become true.
BinaryMask image_to_mask(const RasterImage& img, std::uint8_t threshold = 128);

}  // namespace leafattack
