#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "leafattack/raster.hpp"

namespace leafattack {

struct ConvLayer {
  int out_channels = 0;
  int in_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  int stride = 1;
  int padding = 0;
  /// [out][in][kh][kw]
  std::vector<float> weights;
  std::vector<float> bias;
};

struct ReluLayer {};

struct MaxPoolLayer {
  int window = 2;
  int stride = 2;
};

struct FlattenLayer {};

/// Affine map over the flattened (channel, row, column) input.
struct DenseLayer {
  int out_features = 0;
  int in_features = 0;
  /// [out][in]
  std::vector<float> weights;
  std::vector<float> bias;
};

using LayerSpec = std::variant<ConvLayer, ReluLayer, MaxPoolLayer, FlattenLayer, DenseLayer>;

const char* layer_kind_name(const LayerSpec& layer);

struct TensorShape {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(channels) * static_cast<std::size_t>(height) *
           static_cast<std::size_t>(width);
  }
  bool operator==(const TensorShape&) const = default;
};

struct ClassifierSpec {
  int input_size = 32;
  int input_channels = 3;
  std::vector<LayerSpec> layers;
  std::vector<std::string> class_labels;
};

/// Checks weight lengths and that layer shapes chain to a vector of
/// class_labels.size() scores. Throws ErrorKind::ModelLoad naming the layer.
void validate(const ClassifierSpec& spec);

/// Output shape of every layer, in order.
std::vector<TensorShape> layer_shapes(const ClassifierSpec& spec);

struct Probabilities {
  std::vector<double> values;
  int predicted = 0;
  double confidence_percent = 0.0;

  double of(int label) const { return values.at(static_cast<std::size_t>(label)); }
};

/// Max-subtracted softmax; ties in the argmax go to the lowest index.
Probabilities softmax(std::span<const double> scores);

/// Pre-softmax scores. The image is bilinearly resized to input_size and
/// scaled to [0, 1].
std::vector<double> forward_scores(const ClassifierSpec& spec, const RasterImage& img);
Probabilities forward(const ClassifierSpec& spec, const RasterImage& img);

// Weight files ------------------------------------------------------------

/// Detects the binary ("LCNN" magic) or JSON encoding and validates.
ClassifierSpec load_spec(const std::string& path);
ClassifierSpec decode_spec(const std::string& bytes, const std::string& source = "<memory>");
std::string encode_spec_binary(const ClassifierSpec& spec);
std::string encode_spec_json(const ClassifierSpec& spec, bool include_weights = true);
void save_spec(const ClassifierSpec& spec, const std::string& path);

/// The 16 LISA sign classes used by the default architecture.
std::vector<std::string> lisa_class_labels();

/// 32x32x3 -> [conv3x3x32, relu, pool2] -> [conv3x3x64, relu, pool2]
/// -> [conv3x3x128, relu, pool2] -> flatten -> dense(16), He-uniform weights
/// drawn from a seeded generator.
ClassifierSpec lisa_cnn_architecture(std::uint64_t seed);

// Black-box oracle --------------------------------------------------------

/// Query-only view of a model. `region` is the sign mask of the image being
/// classified; models that look at the whole frame ignore it.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Probabilities predict(const RasterImage& img, const BinaryMask& region) const = 0;
  virtual const std::vector<std::string>& labels() const = 0;
  virtual std::string describe() const = 0;

  std::size_t class_count() const { return labels().size(); }
};

class CnnClassifier final : public Classifier {
 public:
  explicit CnnClassifier(ClassifierSpec spec);

  Probabilities predict(const RasterImage& img, const BinaryMask& region) const override;
  const std::vector<std::string>& labels() const override { return spec_.class_labels; }
  std::string describe() const override;
  const ClassifierSpec& spec() const { return spec_; }

 private:
  ClassifierSpec spec_;
};

/// Deterministic test oracle: class k is chosen when the mean grayscale value
/// inside the region lies in [thresholds[k-1], thresholds[k]). The predicted
/// class gets probability 0.51 + 0.48 * min(1, d / ramp), where d is the
/// distance to the nearest threshold; the rest is split evenly.
class StubClassifier final : public Classifier {
 public:
  StubClassifier(std::vector<double> thresholds, std::vector<std::string> labels, double ramp = 32.0);

  Probabilities predict(const RasterImage& img, const BinaryMask& region) const override;
  const std::vector<std::string>& labels() const override { return labels_; }
  std::string describe() const override;

  const std::vector<double>& thresholds() const { return thresholds_; }
  double ramp() const { return ramp_; }

  static double masked_mean_intensity(const RasterImage& img, const BinaryMask& region);

 private:
  std::vector<double> thresholds_;
  std::vector<std::string> labels_;
  double ramp_;
};

}  // namespace leafattack
