#include <gtest/gtest.h>

#include <filesystem>

#include "leafattack/error.hpp"
#include "leafattack/image_io.hpp"
#include "leafattack/maskgen.hpp"
#include "synthetic.hpp"

namespace leafattack {
namespace {

struct Shape {
  const char* name;
  BinaryMask truth;
  double min_iou;
};

TEST(GenerateLeafMask, RecoversSyntheticShapes) {
  const Shape shapes[] = {
      {"ellipse", testing::leaf_ellipse_truth(), 0.90},
      {"square", testing::leaf_square_truth(), 0.95},
      {"lobed", testing::leaf_lobed_truth(), 0.90},
  };
  for (const auto& s : shapes) {
    const BinaryMask m = generate_leaf_mask(testing::render_dark_on_white(s.truth));
    const double iou = mask_iou(m, s.truth);
    EXPECT_GE(iou, s.min_iou) << s.name;
    RecordProperty(std::string(s.name) + "_iou", std::to_string(iou));
  }
}

TEST(GenerateLeafMask, WithoutShrinkMaskGrows) {
  const BinaryMask truth = testing::leaf_square_truth();
  EdgeParams p;
  p.shrink_to_outline = false;
  const BinaryMask grown = generate_leaf_mask(testing::render_dark_on_white(truth), p);
  EXPECT_TRUE(mask_contains(grown, truth));
  EXPECT_GT(grown.area(), truth.area());
}

TEST(GenerateLeafMask, BlankImageFailsAtCanny) {
  try {
    generate_leaf_mask(RasterImage(64, 64, 3, 255));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MaskGeneration);
    EXPECT_EQ(std::string(e.what()).rfind("canny", 0), 0u) << e.what();
  }
}

TEST(GenerateLeafMask, TooSmallInput) {
  EXPECT_THROW(generate_leaf_mask(RasterImage(15, 40, 3, 255)), Error);
}

TEST(GenerateLeafMask, Deterministic) {
  const RasterImage img = testing::render_dark_on_white(testing::leaf_lobed_truth());
  EXPECT_EQ(generate_leaf_mask(img), generate_leaf_mask(img));
}

TEST(GenerateLeafMask, SelfConsistent) {
  for (const auto& truth : {testing::leaf_ellipse_truth(), testing::leaf_square_truth(), testing::leaf_lobed_truth()}) {
    const BinaryMask once = generate_leaf_mask(testing::render_dark_on_white(truth));
    const BinaryMask twice = generate_leaf_mask(testing::render_dark_on_white(once));
    EXPECT_GE(mask_iou(once, twice), 0.95);
  }
}

TEST(EdgeParams, Validation) {
  EdgeParams p;
  EXPECT_NO_THROW(p.validate());
  p.canny_low = 200;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.close_radius = 0;
  EXPECT_THROW(p.validate(), Error);
}

TEST(MakeLeafAsset, GeneratesOrLoadsMask) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "leafattack_maskgen_asset";
  fs::create_directories(dir);
  const BinaryMask truth = testing::leaf_ellipse_truth();
  RasterImage gray = to_grayscale(testing::render_dark_on_white(truth));
  write_image(gray, (dir / "leaf.png").string());
  write_mask(truth, (dir / "mask.png").string());

  const LeafAsset generated = make_leaf_asset(LeafSpecies::Oak, (dir / "leaf.png").string(), std::nullopt);
  EXPECT_EQ(generated.image.channels(), 3);
  EXPECT_GE(mask_iou(generated.mask, truth), 0.90);

  const LeafAsset loaded =
      make_leaf_asset(LeafSpecies::Maple, (dir / "leaf.png").string(), (dir / "mask.png").string());
  EXPECT_EQ(loaded.mask, truth);
  EXPECT_EQ(loaded.species, LeafSpecies::Maple);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace leafattack
