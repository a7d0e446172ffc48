#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "leafattack/error.hpp"
#include "leafattack/image_io.hpp"
#include "leafattack/classifier.hpp"
#include "model_fixtures.hpp"
#include "synthetic.hpp"

namespace leafattack {
namespace {

TEST(Forward, ZeroWeightsGiveUniform) {
  ClassifierSpec s = testing::random_spec(3);
  for (auto& layer : s.layers) {
    if (auto* c = std::get_if<ConvLayer>(&layer)) {
      std::fill(c->weights.begin(), c->weights.end(), 0.0f);
      std::fill(c->bias.begin(), c->bias.end(), 0.0f);
    } else if (auto* d = std::get_if<DenseLayer>(&layer)) {
      std::fill(d->weights.begin(), d->weights.end(), 0.0f);
      std::fill(d->bias.begin(), d->bias.end(), 0.0f);
    }
  }
  const Probabilities p = forward(s, testing::random_rgb(20, 20, 1));
  for (const double v : p.values) EXPECT_NEAR(v, 1.0 / static_cast<double>(p.values.size()), 1e-12);
  EXPECT_EQ(p.predicted, 0);
}

TEST(Forward, ToySpecMatchesHandComputation) {
  for (const auto& [r, g] : {std::pair<int, int>{128, 64}, {0, 255}, {200, 200}, {17, 3}}) {
    const RasterImage px = testing::solid_rgb(1, 1, static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), 90);
    const Probabilities p = forward(testing::toy_two_class_spec(), px);
    const double p0 = testing::toy_two_class_p0(static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g));
    EXPECT_NEAR(p.of(0), p0, 1e-6);
    EXPECT_NEAR(p.of(1), 1.0 - p0, 1e-6);
  }
}

TEST(Forward, ConvReluPoolByHand) {
  // 2x2 input, 1x1 conv summing R and subtracting G, relu, 2x2 max-pool.
  ClassifierSpec s;
  s.input_size = 2;
  s.layers = {ConvLayer{1, 3, 1, 1, 1, 0, {1, -1, 0}, {0}}, ReluLayer{}, MaxPoolLayer{2, 2}, FlattenLayer{},
              DenseLayer{2, 1, {1, -1}, {0, 0}}};
  s.class_labels = {"a", "b"};
  RasterImage img(2, 2, 3, 0);
  img.at(0, 0, 0) = 51;   // 0.2 - 0
  img.at(1, 0, 1) = 255;  // 0 - 1 -> relu 0
  img.at(0, 1, 0) = 153;  // 0.6
  img.at(0, 1, 1) = 51;   // 0.6 - 0.2 = 0.4
  const std::vector<double> scores = forward_scores(s, img);
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_NEAR(scores[0], 0.4, 1e-6);
  EXPECT_NEAR(scores[1], -0.4, 1e-6);
}

TEST(Forward, ConvPaddingIsZero) {
  // 3x3 kernel that reads only the top-left neighbour; pixel (0,0) sees padding.
  ClassifierSpec s;
  s.input_size = 2;
  std::vector<float> w(27, 0.0f);
  w[0] = 1.0f;  // out 0, in 0 (red), ky 0, kx 0
  s.layers = {ConvLayer{1, 3, 3, 3, 1, 1, w, {0}}, FlattenLayer{}};
  s.class_labels = {"a", "b", "c", "d"};
  RasterImage img(2, 2, 3, 255);
  const std::vector<double> scores = forward_scores(s, img);
  EXPECT_NEAR(scores[0], 0.0, 1e-9);
  EXPECT_NEAR(scores[1], 0.0, 1e-9);
  EXPECT_NEAR(scores[2], 0.0, 1e-9);
  EXPECT_NEAR(scores[3], 1.0, 1e-6);
}

TEST(Forward, RandomSpecsSumToOne) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ClassifierSpec s = testing::random_spec(seed);
    const Probabilities p = forward(s, testing::random_rgb(13, 11, seed + 1000));
    const double total = std::accumulate(p.values.begin(), p.values.end(), 0.0);
    EXPECT_NEAR(total, 1.0, 1e-6) << seed;
    for (const double v : p.values) EXPECT_GE(v, 0.0);
    EXPECT_EQ(p.predicted, static_cast<int>(std::max_element(p.values.begin(), p.values.end()) - p.values.begin()));
    EXPECT_DOUBLE_EQ(p.confidence_percent, 100.0 * p.values[static_cast<std::size_t>(p.predicted)]);
  }
}

TEST(Forward, FinalBiasShiftInvariance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ClassifierSpec s = testing::random_spec(seed);
    // Snap biases to a 2^-12 grid so adding the offset is exact in float.
    for (auto& b : std::get<DenseLayer>(s.layers.back()).bias) b = std::round(b * 4096.0f) / 4096.0f;
    const RasterImage img = testing::random_rgb(16, 16, seed);
    const Probabilities before = forward(s, img);
    for (auto& b : std::get<DenseLayer>(s.layers.back()).bias) b += 7.25f;
    const Probabilities after = forward(s, img);
    for (std::size_t i = 0; i < before.values.size(); ++i) EXPECT_NEAR(before.values[i], after.values[i], 1e-6);
  }
}

TEST(Softmax, LargeScoresAreStable) {
  const std::vector<double> scores{1000.0, 1000.0, -1000.0};
  const Probabilities p = softmax(scores);
  EXPECT_NEAR(p.of(0), 0.5, 1e-12);
  EXPECT_NEAR(p.of(2), 0.0, 1e-12);
  EXPECT_EQ(p.predicted, 0);
}

TEST(LisaArchitecture, ShapesAndDeterminism) {
  const ClassifierSpec a = lisa_cnn_architecture(5);
  EXPECT_NO_THROW(validate(a));
  const auto shapes = layer_shapes(a);
  EXPECT_EQ(shapes.back(), (TensorShape{16, 1, 1}));
  EXPECT_EQ(a.class_labels.size(), 16u);
  EXPECT_EQ(encode_spec_binary(a), encode_spec_binary(lisa_cnn_architecture(5)));
  EXPECT_NE(encode_spec_binary(a), encode_spec_binary(lisa_cnn_architecture(6)));
}

TEST(SpecEncoding, BinaryAndJsonRoundTrip) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ClassifierSpec s = testing::random_spec(seed);
    const RasterImage img = testing::random_rgb(9, 9, seed);
    const ClassifierSpec from_bin = decode_spec(encode_spec_binary(s));
    const ClassifierSpec from_json = decode_spec(encode_spec_json(s));
    EXPECT_EQ(forward(from_bin, img).values, forward(s, img).values);
    EXPECT_EQ(forward(from_json, img).values, forward(s, img).values);
    EXPECT_EQ(encode_spec_binary(from_json), encode_spec_binary(s));
  }
}

TEST(SpecEncoding, SaveAndLoad) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "leafattack_spec_io";
  fs::create_directories(dir);
  const ClassifierSpec s = testing::toy_two_class_spec();
  save_spec(s, (dir / "m.lcnn").string());
  save_spec(s, (dir / "m.json").string());
  EXPECT_EQ(read_file((dir / "m.json").string()).front(), '{');
  EXPECT_EQ(encode_spec_binary(load_spec((dir / "m.lcnn").string())), encode_spec_binary(s));
  EXPECT_EQ(encode_spec_binary(load_spec((dir / "m.json").string())), encode_spec_binary(s));
  fs::remove_all(dir);
}

std::string model_load_message(const std::string& bytes) {
  try {
    decode_spec(bytes);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ModelLoad);
    return e.what();
  }
  ADD_FAILURE() << "decode succeeded";
  return {};
}

TEST(SpecEncoding, TruncatedBinary) {
  const std::string bytes = encode_spec_binary(testing::random_spec(1));
  for (const std::size_t cut : {std::size_t{3}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_FALSE(model_load_message(bytes.substr(0, cut)).empty());
  }
  EXPECT_FALSE(model_load_message(bytes + "x").empty());
}

TEST(SpecEncoding, UnknownLayerKindIsNamed) {
  const std::string msg = model_load_message(
      R"({"format":"lcnn-json","version":1,"input_size":1,"input_channels":3,"class_labels":["a"],)"
      R"("layers":[{"kind":"flatten"},{"kind":"softplus"}]})");
  EXPECT_NE(msg.find("layer 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("softplus"), std::string::npos) << msg;
}

TEST(SpecValidation, ShapeMismatchNamesLayer) {
  ClassifierSpec s = testing::toy_two_class_spec();
  std::get<DenseLayer>(s.layers[1]).in_features = 4;
  std::get<DenseLayer>(s.layers[1]).weights.resize(8);
  try {
    validate(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ModelLoad);
    EXPECT_NE(std::string(e.what()).find("layer 1 (dense)"), std::string::npos) << e.what();
  }
}

TEST(SpecValidation, LabelCountMustMatchOutput) {
  ClassifierSpec s = testing::toy_two_class_spec();
  s.class_labels.push_back("extra");
  EXPECT_THROW(validate(s), Error);
  EXPECT_THROW(CnnClassifier{s}, Error);
}

TEST(StubClassifier, Validation) {
  EXPECT_THROW(StubClassifier({}, {"a"}), Error);
  EXPECT_THROW(StubClassifier({100, 50}, {"a", "b", "c"}), Error);
  EXPECT_THROW(StubClassifier({100}, {"a"}), Error);
  EXPECT_THROW(StubClassifier({100}, {"a", "b"}, 0.0), Error);
}

TEST(StubClassifier, ThresholdBandsAndConfidence) {
  const StubClassifier stub({100.0, 200.0}, {"dark", "mid", "bright"}, 32.0);
  const BinaryMask all(4, 4, true);
  const Probabilities dark = stub.predict(RasterImage(4, 4, 3, 20), all);
  EXPECT_EQ(dark.predicted, 0);
  EXPECT_NEAR(dark.of(0), 0.99, 1e-12);
  const Probabilities mid = stub.predict(RasterImage(4, 4, 3, 116), all);
  EXPECT_EQ(mid.predicted, 1);
  EXPECT_NEAR(mid.of(1), 0.51 + 0.48 * 16.0 / 32.0, 1e-12);
  EXPECT_NEAR(mid.of(0) + mid.of(1) + mid.of(2), 1.0, 1e-12);
  EXPECT_EQ(stub.predict(RasterImage(4, 4, 3, 200), all).predicted, 2);
}

TEST(StubClassifier, ReadsOnlyTheRegion) {
  RasterImage img(4, 4, 3, 0);
  BinaryMask region(4, 4);
  for (int c = 0; c < 3; ++c) img.at(1, 1, c) = 250;
  region.set(1, 1, true);
  EXPECT_DOUBLE_EQ(StubClassifier::masked_mean_intensity(img, region), 250.0);
  EXPECT_DOUBLE_EQ(StubClassifier::masked_mean_intensity(img, BinaryMask(4, 4)), 250.0 / 16.0);
}

}  // namespace
}  // namespace leafattack
