#include "leafattack/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "leafattack/error.hpp"

namespace leafattack {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::Placement: return "placement error";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::NoContour: return "no contour";
    case ErrorKind::MaskGeneration: return "mask generation error";
    case ErrorKind::ModelLoad: return "model load error";
    case ErrorKind::Patch: return "patch error";
    case ErrorKind::UndefinedPercent: return "undefined percent";
    case ErrorKind::Config: return "config error";
  }
  return "error";
}

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::InvalidInput, "raster dimensions must be at least 1x1, got " +
                                             std::to_string(width) + "x" + std::to_string(height));
  }
}

std::size_t checked_size(int width, int height, int channels) {
  check_dims(width, height);
  if (channels != 1 && channels != 3) {
    throw Error(ErrorKind::InvalidInput,
                "raster must have 1 or 3 channels, got " + std::to_string(channels));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
         static_cast<std::size_t>(channels);
}

void require_same_dims(const BinaryMask& a, const BinaryMask& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": mask dimensions differ");
  }
}

std::uint8_t round_to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

RasterImage::RasterImage(int width, int height, int channels, std::uint8_t fill)
    : width_(width),
      height_(height),
      channels_(channels),
      data_(checked_size(width, height, channels), fill) {}

RasterImage::RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (data_.size() != checked_size(width, height, channels)) {
    throw Error(ErrorKind::InvalidInput, "raster data length does not match dimensions");
  }
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height), bits_(checked_size(width, height, 1), fill ? 1 : 0) {}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (bits_.size() != checked_size(width, height, 1)) {
    throw Error(ErrorKind::InvalidInput, "mask length does not match dimensions");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::area() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::optional<PixelBox> BinaryMask::bounding_box() const noexcept {
  int min_x = width_, min_y = height_, max_x = -1, max_y = -1;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!get(x, y)) continue;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  if (max_x < 0) return std::nullopt;
  return PixelBox{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

BinaryMask mask_complement(const BinaryMask& mask) {
  BinaryMask out = mask;
  for (auto& b : out.bits()) b = b ? 0 : 1;
  return out;
}

BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b) {
  require_same_dims(a, b, "mask_intersection");
  BinaryMask out = a;
  auto ob = out.bits();
  auto bb = b.bits();
  for (std::size_t i = 0; i < ob.size(); ++i) ob[i] = ob[i] & bb[i];
  return out;
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
  require_same_dims(a, b, "mask_union");
  BinaryMask out = a;
  auto ob = out.bits();
  auto bb = b.bits();
  for (std::size_t i = 0; i < ob.size(); ++i) ob[i] = ob[i] | bb[i];
  return out;
}

bool mask_contains(const BinaryMask& outer, const BinaryMask& inner) {
  require_same_dims(outer, inner, "mask_contains");
  auto o = outer.bits();
  auto in = inner.bits();
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (in[i] && !o[i]) return false;
  }
  return true;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_dims(a, b, "mask_iou");
  std::size_t inter = 0, uni = 0;
  auto ab = a.bits();
  auto bb = b.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    inter += static_cast<std::size_t>(ab[i] & bb[i]);
    uni += static_cast<std::size_t>(ab[i] | bb[i]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string to_string(LeafSpecies species) {
  switch (species) {
    case LeafSpecies::Maple: return "Maple";
    case LeafSpecies::Oak: return "Oak";
    case LeafSpecies::Poplar: return "Poplar";
  }
  return "Unknown";
}

LeafSpecies parse_species(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "maple") return LeafSpecies::Maple;
  if (lower == "oak") return LeafSpecies::Oak;
  if (lower == "poplar" || lower == "polar") return LeafSpecies::Poplar;
  throw Error(ErrorKind::InvalidParameter, "unknown leaf species '" + std::string(text) + "'");
}

void validate(const LeafAsset& leaf) {
  if (leaf.image.width() != leaf.mask.width() || leaf.image.height() != leaf.mask.height()) {
    throw Error(ErrorKind::InvalidInput, "leaf image and mask dimensions differ");
  }
  if (leaf.mask.area() == 0) {
    throw Error(ErrorKind::InvalidInput, "leaf mask is empty");
  }
}

void validate(const SignInstance& sign, std::size_t class_count) {
  if (sign.image.width() != sign.sign_mask.width() ||
      sign.image.height() != sign.sign_mask.height()) {
    throw Error(ErrorKind::InvalidInput, "sign '" + sign.name + "': image and mask dimensions differ");
  }
  if (sign.sign_mask.area() == 0) {
    throw Error(ErrorKind::InvalidInput, "sign '" + sign.name + "': sign mask is empty");
  }
  if (sign.true_label < 0 || static_cast<std::size_t>(sign.true_label) >= class_count) {
    throw Error(ErrorKind::InvalidInput, "sign '" + sign.name + "': true label " +
                                             std::to_string(sign.true_label) +
                                             " outside classifier class count " +
                                             std::to_string(class_count));
  }
}

RasterImage to_grayscale(const RasterImage& img) {
  if (img.channels() != 3) {
    throw Error(ErrorKind::InvalidInput, "to_grayscale expects an RGB image, got " +
                                             std::to_string(img.channels()) + " channel(s)");
  }
  RasterImage out(img.width(), img.height(), 1);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double luma = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
    dst[i] = round_to_u8(luma);
  }
  return out;
}

namespace {

struct AxisSample {
  int i0;
  int i1;
  double frac;
};

// Pixel-center aligned source coordinate for destination index `d`.
AxisSample bilinear_axis(int d, int src_len, int dst_len) {
  double s = (d + 0.5) * static_cast<double>(src_len) / static_cast<double>(dst_len) - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
  const int i0 = static_cast<int>(std::floor(s));
  const int i1 = std::min(i0 + 1, src_len - 1);
  return {i0, i1, s - i0};
}

int nearest_axis(int d, int src_len, int dst_len) {
  // floor((d + 0.5) * src / dst) in exact integer arithmetic.
  const long long num = (2LL * d + 1) * src_len;
  return static_cast<int>(std::min<long long>(num / (2LL * dst_len), src_len - 1));
}

double lerp(double a, double b, double t) { return a + (b - a) * t; }

}  // namespace

RasterImage scale(const RasterImage& img, int new_width, int new_height, Resample mode) {
  if (new_width < 1 || new_height < 1) {
    throw Error(ErrorKind::InvalidInput, "scale target must be at least 1x1");
  }
  const int ch = img.channels();
  RasterImage out(new_width, new_height, ch);
  if (mode == Resample::Nearest) {
    for (int y = 0; y < new_height; ++y) {
      const int sy = nearest_axis(y, img.height(), new_height);
      for (int x = 0; x < new_width; ++x) {
        const int sx = nearest_axis(x, img.width(), new_width);
        for (int c = 0; c < ch; ++c) out.at(x, y, c) = img.at(sx, sy, c);
      }
    }
    return out;
  }
  std::vector<AxisSample> xs(static_cast<std::size_t>(new_width));
  for (int x = 0; x < new_width; ++x) xs[static_cast<std::size_t>(x)] = bilinear_axis(x, img.width(), new_width);
  for (int y = 0; y < new_height; ++y) {
    const AxisSample ys = bilinear_axis(y, img.height(), new_height);
    for (int x = 0; x < new_width; ++x) {
      const AxisSample& xsmp = xs[static_cast<std::size_t>(x)];
      for (int c = 0; c < ch; ++c) {
        const double top = lerp(img.at(xsmp.i0, ys.i0, c), img.at(xsmp.i1, ys.i0, c), xsmp.frac);
        const double bot = lerp(img.at(xsmp.i0, ys.i1, c), img.at(xsmp.i1, ys.i1, c), xsmp.frac);
        out.at(x, y, c) = round_to_u8(lerp(top, bot, ys.frac));
      }
    }
  }
  return out;
}

BinaryMask scale_mask(const BinaryMask& mask, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1) {
    throw Error(ErrorKind::InvalidInput, "scale target must be at least 1x1");
  }
  BinaryMask out(new_width, new_height);
  for (int y = 0; y < new_height; ++y) {
    const int sy = nearest_axis(y, mask.height(), new_height);
    for (int x = 0; x < new_width; ++x) {
      out.set(x, y, mask.get(nearest_axis(x, mask.width(), new_width), sy));
    }
  }
  return out;
}

namespace {

// Exact trig for multiples of 90 degrees so axis-aligned rotations permute
// pixels without resampling error.
std::pair<double, double> rotation_cos_sin(double angle_deg) {
  double a = std::fmod(angle_deg, 360.0);
  if (a < 0) a += 360.0;
  if (a == 0.0) return {1.0, 0.0};
  if (a == 90.0) return {0.0, 1.0};
  if (a == 180.0) return {-1.0, 0.0};
  if (a == 270.0) return {0.0, -1.0};
  const double rad = a * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

}  // namespace

RotatedPatch rotate(const RasterImage& img, const BinaryMask& mask, double angle_deg) {
  if (img.width() != mask.width() || img.height() != mask.height()) {
    throw Error(ErrorKind::InvalidInput, "rotate: image and mask dimensions differ");
  }
  const auto [c, s] = rotation_cos_sin(angle_deg);
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();
  const int out_w = std::max(1, static_cast<int>(std::ceil(w * std::abs(c) + h * std::abs(s) - 1e-9)));
  const int out_h = std::max(1, static_cast<int>(std::ceil(w * std::abs(s) + h * std::abs(c) - 1e-9)));

  RotatedPatch out{RasterImage(out_w, out_h, ch), BinaryMask(out_w, out_h)};
  const double half_out_w = out_w / 2.0;
  const double half_out_h = out_h / 2.0;
  const double half_w = w / 2.0;
  const double half_h = h / 2.0;

  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      const double dx = ox + 0.5 - half_out_w;
      const double dy = oy + 0.5 - half_out_h;
      // Inverse of a displayed-counterclockwise rotation with y pointing down.
      const double sx = dx * c - dy * s + half_w - 0.5;
      const double sy = dx * s + dy * c + half_h - 0.5;
      if (sx < -0.5 || sy < -0.5 || sx >= w - 0.5 || sy >= h - 0.5) continue;

      const int nx = std::clamp(static_cast<int>(std::floor(sx + 0.5)), 0, w - 1);
      const int ny = std::clamp(static_cast<int>(std::floor(sy + 0.5)), 0, h - 1);
      out.mask.set(ox, oy, mask.get(nx, ny));

      const double cx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
      const double cy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
      const int x0 = static_cast<int>(std::floor(cx));
      const int y0 = static_cast<int>(std::floor(cy));
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = cx - x0;
      const double fy = cy - y0;
      for (int k = 0; k < ch; ++k) {
        const double top = lerp(img.at(x0, y0, k), img.at(x1, y0, k), fx);
        const double bot = lerp(img.at(x0, y1, k), img.at(x1, y1, k), fx);
        out.image.at(ox, oy, k) = round_to_u8(lerp(top, bot, fy));
      }
    }
  }
  return out;
}

RasterImage composite(const RasterImage& base, const RasterImage& patch,
                      const BinaryMask& patch_mask, int x, int y) {
  if (patch.width() != patch_mask.width() || patch.height() != patch_mask.height()) {
    throw Error(ErrorKind::InvalidInput, "composite: patch and mask dimensions differ");
  }
  if (patch.channels() != base.channels()) {
    throw Error(ErrorKind::InvalidInput, "composite: channel count mismatch");
  }
  if (x < 0 || y < 0 || x + patch.width() > base.width() || y + patch.height() > base.height()) {
    throw Error(ErrorKind::Placement,
                "composite: " + std::to_string(patch.width()) + "x" + std::to_string(patch.height()) +
                    " patch at (" + std::to_string(x) + "," + std::to_string(y) +
                    ") exceeds " + std::to_string(base.width()) + "x" +
                    std::to_string(base.height()) + " base");
  }
  RasterImage out = base;
  const int ch = base.channels();
  for (int py = 0; py < patch.height(); ++py) {
    for (int px = 0; px < patch.width(); ++px) {
      if (!patch_mask.get(px, py)) continue;
      for (int c = 0; c < ch; ++c) out.at(x + px, y + py, c) = patch.at(px, py, c);
    }
  }
  return out;
}

RasterImage mask_to_image(const BinaryMask& mask) {
  RasterImage out(mask.width(), mask.height(), 1);
  auto src = mask.bits();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] ? 255 : 0;
  return out;
}

BinaryMask image_to_mask(const RasterImage& img, std::uint8_t threshold) {
  BinaryMask out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(x, y, img.at(x, y, 0) >= threshold);
  }
  return out;
}

}  // namespace leafattack
