#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "leafattack/error.hpp"
#include "leafattack/raster.hpp"
#include "synthetic.hpp"

namespace leafattack {
namespace {

using testing::random_rgb;
using testing::solid_rgb;

TEST(RasterImage, RejectsBadShapes) {
  EXPECT_THROW(RasterImage(0, 4, 3), Error);
  EXPECT_THROW(RasterImage(4, 4, 2), Error);
  EXPECT_THROW(RasterImage(2, 2, 1, std::vector<std::uint8_t>(3)), Error);
  EXPECT_THROW(BinaryMask(3, 0), Error);
}

TEST(BinaryMask, AreaAndBoundingBox) {
  BinaryMask m(10, 8);
  EXPECT_EQ(m.area(), 0u);
  EXPECT_FALSE(m.bounding_box().has_value());
  m.set(2, 3, true);
  m.set(6, 5, true);
  EXPECT_EQ(m.area(), 2u);
  EXPECT_EQ(*m.bounding_box(), (PixelBox{2, 3, 5, 3}));
}

TEST(ToGrayscale, KnownPixels) {
  EXPECT_EQ(to_grayscale(solid_rgb(1, 1, 255, 255, 255)).at(0, 0), 255);
  EXPECT_EQ(to_grayscale(solid_rgb(1, 1, 0, 0, 0)).at(0, 0), 0);
  // round(0.299 * 255) = round(76.245)
  EXPECT_EQ(to_grayscale(solid_rgb(1, 1, 255, 0, 0)).at(0, 0), 76);
}

TEST(ToGrayscale, RejectsGrayInput) {
  EXPECT_THROW(to_grayscale(RasterImage(2, 2, 1)), Error);
}

TEST(ToGrayscale, WithinChannelRange) {
  const RasterImage img = random_rgb(40, 30, 7);
  const RasterImage g = to_grayscale(img);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const int r = img.at(x, y, 0), gg = img.at(x, y, 1), b = img.at(x, y, 2);
      EXPECT_GE(g.at(x, y), std::min({r, gg, b}));
      EXPECT_LE(g.at(x, y), std::max({r, gg, b}));
    }
  }
}

TEST(Scale, IdentityNearest) {
  const RasterImage img = random_rgb(13, 9, 1);
  EXPECT_EQ(scale(img, 13, 9, Resample::Nearest), img);
  EXPECT_EQ(scale(img, 13, 9, Resample::Bilinear), img);
}

TEST(Scale, CheckerboardToSinglePixel) {
  RasterImage img(2, 2, 1, std::vector<std::uint8_t>{0, 255, 255, 0});
  // Sample center (0.5, 0.5) weights all four corners by 1/4: 127.5 -> 128.
  EXPECT_EQ(scale(img, 1, 1, Resample::Bilinear).at(0, 0), 128);
}

TEST(Scale, ConstantStaysConstant) {
  const RasterImage img = solid_rgb(17, 11, 90, 12, 201);
  for (const auto& [w, h] : {std::pair{5, 3}, std::pair{40, 29}, std::pair{1, 1}}) {
    for (const auto mode : {Resample::Bilinear, Resample::Nearest}) {
      EXPECT_EQ(scale(img, w, h, mode), solid_rgb(w, h, 90, 12, 201));
    }
  }
}

TEST(Scale, ZeroTargetIsError) {
  EXPECT_THROW(scale(RasterImage(3, 3, 1), 0, 3, Resample::Bilinear), Error);
  EXPECT_THROW(scale_mask(BinaryMask(3, 3), 3, 0), Error);
}

TEST(ScaleMask, IntegerFactorMultipliesArea) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const BinaryMask m = testing::random_mask(9, 7, 0.4, seed);
    for (const int k : {2, 3, 5}) {
      EXPECT_EQ(scale_mask(m, 9 * k, 7 * k).area(), static_cast<std::size_t>(k * k) * m.area());
    }
  }
}

TEST(Rotate, ZeroIsIdentity) {
  const RasterImage img = random_rgb(12, 7, 3);
  const BinaryMask m = testing::random_mask(12, 7, 0.5, 3);
  const RotatedPatch r = rotate(img, m, 0.0);
  EXPECT_EQ(r.image, img);
  EXPECT_EQ(r.mask, m);
}

TEST(Rotate, NinetySwapsDimensionsAndPreservesArea) {
  const RasterImage img = random_rgb(12, 7, 4);
  const BinaryMask m = testing::random_mask(12, 7, 0.5, 4);
  const RotatedPatch r = rotate(img, m, 90.0);
  EXPECT_EQ(r.image.width(), 7);
  EXPECT_EQ(r.image.height(), 12);
  EXPECT_EQ(r.mask.area(), m.area());
  // Counterclockwise: the top-right source pixel lands top-left.
  EXPECT_EQ(r.image.at(0, 0, 0), img.at(11, 0, 0));
}

TEST(Rotate, FourQuarterTurnsIsIdentity) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RasterImage img = random_rgb(10 + static_cast<int>(seed), 6, seed);
    const BinaryMask m = testing::random_mask(img.width(), 6, 0.5, seed);
    RotatedPatch r{img, m};
    for (int i = 0; i < 4; ++i) r = rotate(r.image, r.mask, 90.0);
    EXPECT_EQ(r.image, img);
    EXPECT_EQ(r.mask, m);
  }
}

TEST(Rotate, FortyFiveDegreeSolidSquareAreaMatchesBruteForce) {
  const BinaryMask m(20, 20, true);
  const RasterImage img(20, 20, 3, 200);
  const RotatedPatch r = rotate(img, m, 45.0);
  // Oracle: canvas pixel centers that fall inside the square rotated about
  // the canvas center.
  const double cx = r.mask.width() / 2.0, cy = r.mask.height() / 2.0;
  const double c = std::cos(std::numbers::pi / 4), s = std::sin(std::numbers::pi / 4);
  std::size_t oracle = 0;
  for (int y = 0; y < r.mask.height(); ++y) {
    for (int x = 0; x < r.mask.width(); ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      const double u = dx * c - dy * s, v = dx * s + dy * c;
      if (std::abs(u) <= 10.0 && std::abs(v) <= 10.0) ++oracle;
    }
  }
  EXPECT_NEAR(static_cast<double>(r.mask.area()), 400.0, 40.0);
  EXPECT_NEAR(static_cast<double>(r.mask.area()), static_cast<double>(oracle), 8.0);
  EXPECT_EQ(r.mask.width(), 29);
}

TEST(Rotate, OutsideSourceIsBlackAndFalse) {
  const RotatedPatch r = rotate(RasterImage(10, 10, 3, 200), BinaryMask(10, 10, true), 45.0);
  EXPECT_FALSE(r.mask.get(0, 0));
  EXPECT_EQ(r.image.at(0, 0, 0), 0);
}

TEST(Rotate, DimensionMismatch) {
  EXPECT_THROW(rotate(RasterImage(4, 4, 3), BinaryMask(4, 5), 10.0), Error);
}

TEST(Composite, EmptyMaskLeavesBase) {
  const RasterImage base = random_rgb(16, 16, 5);
  const RasterImage patch = random_rgb(4, 4, 6);
  EXPECT_EQ(composite(base, patch, BinaryMask(4, 4), 3, 3), base);
}

TEST(Composite, FullMaskReplacesEverything) {
  const RasterImage base = random_rgb(8, 8, 5);
  const RasterImage patch = random_rgb(8, 8, 6);
  EXPECT_EQ(composite(base, patch, BinaryMask(8, 8, true), 0, 0), patch);
}

TEST(Composite, SingleBitChangesOnePixel) {
  const RasterImage base = solid_rgb(12, 12, 10, 10, 10);
  const RasterImage patch = solid_rgb(5, 5, 250, 250, 250);
  BinaryMask pm(5, 5);
  pm.set(2, 4, true);
  const RasterImage out = composite(base, patch, pm, 3, 6);
  int differing = 0;
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 12; ++x) differing += out.at(x, y, 0) != base.at(x, y, 0);
  }
  EXPECT_EQ(differing, 1);
  EXPECT_EQ(out.at(5, 10, 0), 250);
}

TEST(Composite, Idempotent) {
  const RasterImage base = random_rgb(20, 20, 8);
  const RasterImage patch = random_rgb(7, 9, 9);
  const BinaryMask pm = testing::random_mask(7, 9, 0.5, 9);
  const RasterImage once = composite(base, patch, pm, 4, 2);
  EXPECT_EQ(composite(once, patch, pm, 4, 2), once);
}

TEST(Composite, OutOfBoundsIsPlacementError) {
  try {
    composite(RasterImage(8, 8, 3), RasterImage(4, 4, 3), BinaryMask(4, 4, true), 5, 0);
    FAIL() << "expected placement error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Placement);
  }
}

TEST(Species, ParseAcceptsTableSpelling) {
  EXPECT_EQ(parse_species("maple"), LeafSpecies::Maple);
  EXPECT_EQ(parse_species("Polar"), LeafSpecies::Poplar);
  EXPECT_THROW(parse_species("birch"), Error);
}

TEST(Validate, SignAndLeafInvariants) {
  SignInstance sign{"s", RasterImage(4, 4, 3), BinaryMask(4, 4, true), 2};
  EXPECT_NO_THROW(validate(sign, 3));
  EXPECT_THROW(validate(sign, 2), Error);
  sign.sign_mask = BinaryMask(4, 4);
  EXPECT_THROW(validate(sign, 3), Error);
  LeafAsset leaf{LeafSpecies::Oak, RasterImage(4, 4, 3), BinaryMask(4, 3, true)};
  EXPECT_THROW(validate(leaf), Error);
}

}  // namespace
}  // namespace leafattack
