#include "leafattack/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "leafattack/error.hpp"

namespace leafattack {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void layer_fail(std::size_t index, const LayerSpec& layer, const std::string& what) {
  throw Error(ErrorKind::ModelLoad, "layer " + std::to_string(index) + " (" +
                                        layer_kind_name(layer) + "): " + what);
}

}  // namespace

const char* layer_kind_name(const LayerSpec& layer) {
  return std::visit(Overloaded{
                        [](const ConvLayer&) { return "conv"; },
                        [](const ReluLayer&) { return "relu"; },
                        [](const MaxPoolLayer&) { return "maxpool"; },
                        [](const FlattenLayer&) { return "flatten"; },
                        [](const DenseLayer&) { return "dense"; },
                    },
                    layer);
}

std::vector<TensorShape> layer_shapes(const ClassifierSpec& spec) {
  if (spec.input_size < 1) throw Error(ErrorKind::ModelLoad, "input_size must be >= 1");
  if (spec.input_channels != 3) {
    throw Error(ErrorKind::ModelLoad, "input_channels must be 3 (RGB)");
  }
  std::vector<TensorShape> shapes;
  TensorShape cur{spec.input_channels, spec.input_size, spec.input_size};
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& layer = spec.layers[i];
    std::visit(
        Overloaded{
            [&](const ConvLayer& c) {
              if (c.out_channels < 1 || c.kernel_h < 1 || c.kernel_w < 1 || c.stride < 1 || c.padding < 0) {
                layer_fail(i, layer, "non-positive dimension");
              }
              if (c.in_channels != cur.channels) {
                layer_fail(i, layer, "expects " + std::to_string(c.in_channels) +
                                         " input channels, predecessor yields " +
                                         std::to_string(cur.channels));
              }
              const std::size_t wn = static_cast<std::size_t>(c.out_channels) * c.in_channels * c.kernel_h * c.kernel_w;
              if (c.weights.size() != wn) {
                layer_fail(i, layer, "weight count " + std::to_string(c.weights.size()) +
                                         " != declared " + std::to_string(wn));
              }
              if (c.bias.size() != static_cast<std::size_t>(c.out_channels)) {
                layer_fail(i, layer, "bias count mismatch");
              }
              const int oh = (cur.height + 2 * c.padding - c.kernel_h) / c.stride + 1;
              const int ow = (cur.width + 2 * c.padding - c.kernel_w) / c.stride + 1;
              if (cur.height + 2 * c.padding < c.kernel_h || cur.width + 2 * c.padding < c.kernel_w) {
                layer_fail(i, layer, "kernel larger than padded input");
              }
              cur = {c.out_channels, oh, ow};
            },
            [&](const ReluLayer&) {},
            [&](const MaxPoolLayer& p) {
              if (p.window < 1 || p.stride < 1) layer_fail(i, layer, "non-positive window or stride");
              if (p.window > cur.height || p.window > cur.width) {
                layer_fail(i, layer, "window larger than input");
              }
              cur = {cur.channels, (cur.height - p.window) / p.stride + 1,
                     (cur.width - p.window) / p.stride + 1};
            },
            [&](const FlattenLayer&) { cur = {static_cast<int>(cur.size()), 1, 1}; },
            [&](const DenseLayer& d) {
              if (d.out_features < 1) layer_fail(i, layer, "non-positive output features");
              if (static_cast<std::size_t>(d.in_features) != cur.size()) {
                layer_fail(i, layer, "expects " + std::to_string(d.in_features) +
                                         " input features, predecessor yields " +
                                         std::to_string(cur.size()));
              }
              const std::size_t wn = static_cast<std::size_t>(d.out_features) * d.in_features;
              if (d.weights.size() != wn) {
                layer_fail(i, layer, "weight count " + std::to_string(d.weights.size()) +
                                         " != declared " + std::to_string(wn));
              }
              if (d.bias.size() != static_cast<std::size_t>(d.out_features)) {
                layer_fail(i, layer, "bias count mismatch");
              }
              cur = {d.out_features, 1, 1};
            },
        },
        layer);
    shapes.push_back(cur);
  }
  return shapes;
}

void validate(const ClassifierSpec& spec) {
  const auto shapes = layer_shapes(spec);
  if (spec.class_labels.empty()) throw Error(ErrorKind::ModelLoad, "no class labels");
  const TensorShape last = shapes.empty()
                               ? TensorShape{spec.input_channels, spec.input_size, spec.input_size}
                               : shapes.back();
  if (last.size() != spec.class_labels.size()) {
    throw Error(ErrorKind::ModelLoad, "final layer yields " + std::to_string(last.size()) +
                                          " scores but " + std::to_string(spec.class_labels.size()) +
                                          " class labels are declared");
  }
}

Probabilities softmax(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorKind::InvalidInput, "softmax of an empty score vector");
  Probabilities p;
  const double max_score = *std::max_element(scores.begin(), scores.end());
  p.values.resize(scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    p.values[i] = std::exp(scores[i] - max_score);
    sum += p.values[i];
  }
  for (auto& v : p.values) v /= sum;
  p.predicted = static_cast<int>(std::max_element(p.values.begin(), p.values.end()) - p.values.begin());
  p.confidence_percent = 100.0 * p.values[static_cast<std::size_t>(p.predicted)];
  return p;
}

namespace {

struct Tensor {
  TensorShape shape;
  std::vector<double> data;

  double& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * shape.height + y) * shape.width + x];
  }
  double at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * shape.height + y) * shape.width + x];
  }
};

Tensor apply(const ConvLayer& conv, const Tensor& in) {
  const int oh = (in.shape.height + 2 * conv.padding - conv.kernel_h) / conv.stride + 1;
  const int ow = (in.shape.width + 2 * conv.padding - conv.kernel_w) / conv.stride + 1;
  Tensor out{{conv.out_channels, oh, ow}, {}};
  out.data.assign(out.shape.size(), 0.0);
  for (int oc = 0; oc < conv.out_channels; ++oc) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double acc = conv.bias[static_cast<std::size_t>(oc)];
        for (int ic = 0; ic < conv.in_channels; ++ic) {
          const float* kw = conv.weights.data() +
                            ((static_cast<std::size_t>(oc) * conv.in_channels + ic) * conv.kernel_h) * conv.kernel_w;
          for (int ky = 0; ky < conv.kernel_h; ++ky) {
            const int iy = oy * conv.stride + ky - conv.padding;
            if (iy < 0 || iy >= in.shape.height) continue;
            for (int kx = 0; kx < conv.kernel_w; ++kx) {
              const int ix = ox * conv.stride + kx - conv.padding;
              if (ix < 0 || ix >= in.shape.width) continue;
              acc += kw[ky * conv.kernel_w + kx] * in.at(ic, iy, ix);
            }
          }
        }
        out.at(oc, oy, ox) = acc;
      }
    }
  }
  return out;
}

Tensor apply(const MaxPoolLayer& pool, const Tensor& in) {
  const int oh = (in.shape.height - pool.window) / pool.stride + 1;
  const int ow = (in.shape.width - pool.window) / pool.stride + 1;
  Tensor out{{in.shape.channels, oh, ow}, {}};
  out.data.resize(out.shape.size());
  for (int c = 0; c < in.shape.channels; ++c) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double m = in.at(c, oy * pool.stride, ox * pool.stride);
        for (int ky = 0; ky < pool.window; ++ky) {
          for (int kx = 0; kx < pool.window; ++kx) {
            m = std::max(m, in.at(c, oy * pool.stride + ky, ox * pool.stride + kx));
          }
        }
        out.at(c, oy, ox) = m;
      }
    }
  }
  return out;
}

Tensor apply(const DenseLayer& dense, const Tensor& in) {
  Tensor out{{dense.out_features, 1, 1}, std::vector<double>(static_cast<std::size_t>(dense.out_features))};
  for (int o = 0; o < dense.out_features; ++o) {
    const float* row = dense.weights.data() + static_cast<std::size_t>(o) * dense.in_features;
    double acc = dense.bias[static_cast<std::size_t>(o)];
    for (int i = 0; i < dense.in_features; ++i) acc += row[i] * in.data[static_cast<std::size_t>(i)];
    out.data[static_cast<std::size_t>(o)] = acc;
  }
  return out;
}

}  // namespace

std::vector<double> forward_scores(const ClassifierSpec& spec, const RasterImage& img) {
  if (img.channels() != 3) {
    throw Error(ErrorKind::InvalidInput, "classifier input must be an RGB image");
  }
  const RasterImage resized = (img.width() == spec.input_size && img.height() == spec.input_size)
                                  ? img
                                  : scale(img, spec.input_size, spec.input_size, Resample::Bilinear);
  Tensor t{{3, spec.input_size, spec.input_size}, {}};
  t.data.resize(t.shape.size());
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < spec.input_size; ++y) {
      for (int x = 0; x < spec.input_size; ++x) {
        t.at(c, y, x) = resized.at(x, y, c) / 255.0;
      }
    }
  }
  for (const LayerSpec& layer : spec.layers) {
    std::visit(Overloaded{
                   [&](const ConvLayer& c) { t = apply(c, t); },
                   [&](const ReluLayer&) {
                     for (auto& v : t.data) v = std::max(v, 0.0);
                   },
                   [&](const MaxPoolLayer& p) { t = apply(p, t); },
                   [&](const FlattenLayer&) { t.shape = {static_cast<int>(t.shape.size()), 1, 1}; },
                   [&](const DenseLayer& d) { t = apply(d, t); },
               },
               layer);
  }
  return std::move(t.data);
}

Probabilities forward(const ClassifierSpec& spec, const RasterImage& img) {
  const auto scores = forward_scores(spec, img);
  return softmax(scores);
}

std::vector<std::string> lisa_class_labels() {
  return {"Added Lane",  "Keep Right",     "Lane Ends",      "Merge",
          "Ped. Crossing", "School",       "School Speed Limit 25", "Signal Ahead",
          "Speed Limit 25", "Speed Limit 30", "Speed Limit 35", "Speed Limit 45",
          "Stop",        "Stop Ahead",     "Turn Right",     "Yield"};
}

ClassifierSpec lisa_cnn_architecture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Raw 53-bit draw so the weights are identical across standard libraries.
  auto uniform = [&](double limit) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return static_cast<float>((2.0 * u - 1.0) * limit);
  };
  ClassifierSpec spec;
  spec.input_size = 32;
  spec.input_channels = 3;
  spec.class_labels = lisa_class_labels();

  int channels = 3;
  int side = 32;
  for (const int out : {32, 64, 128}) {
    ConvLayer conv;
    conv.out_channels = out;
    conv.in_channels = channels;
    conv.kernel_h = conv.kernel_w = 3;
    conv.stride = 1;
    conv.padding = 1;
    const double limit = std::sqrt(6.0 / (channels * 9));
    conv.weights.resize(static_cast<std::size_t>(out) * channels * 9);
    for (auto& w : conv.weights) w = uniform(limit);
    conv.bias.assign(static_cast<std::size_t>(out), 0.0f);
    spec.layers.emplace_back(std::move(conv));
    spec.layers.emplace_back(ReluLayer{});
    spec.layers.emplace_back(MaxPoolLayer{2, 2});
    channels = out;
    side /= 2;
  }
  spec.layers.emplace_back(FlattenLayer{});
  DenseLayer dense;
  dense.in_features = channels * side * side;
  dense.out_features = static_cast<int>(spec.class_labels.size());
  const double limit = std::sqrt(6.0 / dense.in_features);
  dense.weights.resize(static_cast<std::size_t>(dense.in_features) * dense.out_features);
  for (auto& w : dense.weights) w = uniform(limit);
  dense.bias.assign(static_cast<std::size_t>(dense.out_features), 0.0f);
  spec.layers.emplace_back(std::move(dense));
  validate(spec);
  return spec;
}

CnnClassifier::CnnClassifier(ClassifierSpec spec) : spec_(std::move(spec)) { validate(spec_); }

Probabilities CnnClassifier::predict(const RasterImage& img, const BinaryMask&) const {
  return forward(spec_, img);
}

std::string CnnClassifier::describe() const {
  std::ostringstream ss;
  ss << "cnn input=" << spec_.input_size << "x" << spec_.input_size << "x" << spec_.input_channels
     << " layers=";
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    if (i) ss << ",";
    ss << layer_kind_name(spec_.layers[i]);
  }
  ss << " classes=" << spec_.class_labels.size();
  return ss.str();
}

StubClassifier::StubClassifier(std::vector<double> thresholds, std::vector<std::string> labels, double ramp)
    : thresholds_(std::move(thresholds)), labels_(std::move(labels)), ramp_(ramp) {
  if (thresholds_.empty()) {
    throw Error(ErrorKind::InvalidParameter, "stub classifier needs at least one threshold");
  }
  for (std::size_t i = 1; i < thresholds_.size(); ++i) {
    if (!(thresholds_[i] > thresholds_[i - 1])) {
      throw Error(ErrorKind::InvalidParameter, "stub classifier thresholds must be strictly increasing");
    }
  }
  if (labels_.size() != thresholds_.size() + 1) {
    throw Error(ErrorKind::InvalidParameter, "stub classifier needs exactly one more label than thresholds");
  }
  if (!(ramp_ > 0.0)) throw Error(ErrorKind::InvalidParameter, "stub classifier ramp must be positive");
}

double StubClassifier::masked_mean_intensity(const RasterImage& img, const BinaryMask& region) {
  const RasterImage gray = img.channels() == 3 ? to_grayscale(img) : img;
  const bool use_region = region.width() == gray.width() && region.height() == gray.height() &&
                          region.area() > 0;
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      if (use_region && !region.get(x, y)) continue;
      sum += gray.at(x, y);
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

Probabilities StubClassifier::predict(const RasterImage& img, const BinaryMask& region) const {
  const double mean = masked_mean_intensity(img, region);
  const auto cls = static_cast<std::size_t>(
      std::upper_bound(thresholds_.begin(), thresholds_.end(), mean) - thresholds_.begin());
  double distance = std::abs(mean - thresholds_.front());
  for (const double t : thresholds_) distance = std::min(distance, std::abs(mean - t));
  const double top = 0.51 + 0.48 * std::min(1.0, distance / ramp_);
  Probabilities p;
  const double rest = (1.0 - top) / static_cast<double>(labels_.size() - 1);
  p.values.assign(labels_.size(), rest);
  p.values[cls] = top;
  p.predicted = static_cast<int>(cls);
  p.confidence_percent = 100.0 * top;
  return p;
}

std::string StubClassifier::describe() const {
  std::ostringstream ss;
  ss << "stub thresholds=[";
  for (std::size_t i = 0; i < thresholds_.size(); ++i) ss << (i ? "," : "") << thresholds_[i];
  ss << "] ramp=" << ramp_ << " classes=" << labels_.size();
  return ss.str();
}

}  // namespace leafattack
