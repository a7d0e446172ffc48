// Weight file encodings.
//
// Binary layout (all integers u32 little-endian, reals IEEE-754 f32 LE):
//   "LCNN" | version=1 | layer_count | input_size | input_channels
//   per layer: kind u8, then
//     1 conv     out_ch in_ch kh kw stride padding | weights | bias
//     2 relu     -
//     3 maxpool  window stride
//     4 flatten  -
//     5 dense    out in | weights | bias
//   class_count, then per label: byte length | UTF-8 bytes

#include <algorithm>
#include <bit>
#include <cstring>
#include <json.hpp>

#include "leafattack/classifier.hpp"
#include "leafattack/error.hpp"
#include "leafattack/image_io.hpp"

namespace leafattack {

namespace {

constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxDim = 1u << 20;

enum class Tag : std::uint8_t { Conv = 1, Relu = 2, MaxPool = 3, Flatten = 4, Dense = 5 };

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void f32s(const std::vector<float>& values) {
    for (const float f : values) u32(std::bit_cast<std::uint32_t>(f));
  }
  void bytes(const std::string& s) { out_ += s; }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& source) : bytes_(bytes), source_(source) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  int dim(const char* what) {
    const std::uint32_t v = u32();
    if (v > kMaxDim) fail(std::string(what) + " dimension " + std::to_string(v) + " is implausibly large");
    return static_cast<int>(v);
  }
  std::vector<float> f32s(std::size_t n) {
    need(n * 4);
    std::vector<float> v(n);
    for (auto& f : v) f = std::bit_cast<float>(u32());
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == bytes_.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ModelLoad, source_ + ": " + what);
  }
  void set_context(std::string ctx) { context_ = std::move(ctx); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      fail("truncated weights" + (context_.empty() ? std::string() : " in " + context_));
    }
  }

  const std::string& bytes_;
  const std::string& source_;
  std::size_t pos_ = 0;
  std::string context_;
};

std::size_t product(std::initializer_list<int> dims) {
  std::size_t p = 1;
  for (const int d : dims) p *= static_cast<std::size_t>(d);
  return p;
}

ClassifierSpec decode_binary(const std::string& bytes, const std::string& source) {
  Reader r(bytes, source);
  if (r.str(4) != "LCNN") r.fail("bad magic");
  const std::uint32_t version = r.u32();
  if (version != kVersion) r.fail("unsupported version " + std::to_string(version));
  const std::uint32_t layer_count = r.u32();
  if (layer_count > 4096) r.fail("implausible layer count");
  ClassifierSpec spec;
  spec.input_size = r.dim("input");
  spec.input_channels = r.dim("input channel");
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    r.set_context("layer " + std::to_string(i));
    const auto tag = r.u8();
    switch (static_cast<Tag>(tag)) {
      case Tag::Conv: {
        ConvLayer c;
        c.out_channels = r.dim("conv");
        c.in_channels = r.dim("conv");
        c.kernel_h = r.dim("conv");
        c.kernel_w = r.dim("conv");
        c.stride = r.dim("conv");
        c.padding = r.dim("conv");
        c.weights = r.f32s(product({c.out_channels, c.in_channels, c.kernel_h, c.kernel_w}));
        c.bias = r.f32s(static_cast<std::size_t>(c.out_channels));
        spec.layers.emplace_back(std::move(c));
        break;
      }
      case Tag::Relu: spec.layers.emplace_back(ReluLayer{}); break;
      case Tag::MaxPool: {
        MaxPoolLayer p;
        p.window = r.dim("maxpool");
        p.stride = r.dim("maxpool");
        spec.layers.emplace_back(p);
        break;
      }
      case Tag::Flatten: spec.layers.emplace_back(FlattenLayer{}); break;
      case Tag::Dense: {
        DenseLayer d;
        d.out_features = r.dim("dense");
        d.in_features = r.dim("dense");
        d.weights = r.f32s(product({d.out_features, d.in_features}));
        d.bias = r.f32s(static_cast<std::size_t>(d.out_features));
        spec.layers.emplace_back(std::move(d));
        break;
      }
      default:
        throw Error(ErrorKind::ModelLoad, source + ": layer " + std::to_string(i) +
                                              ": unknown layer kind tag " + std::to_string(tag));
    }
  }
  r.set_context("class labels");
  const std::uint32_t classes = r.u32();
  if (classes > 65536) r.fail("implausible class count");
  for (std::uint32_t i = 0; i < classes; ++i) {
    const std::uint32_t len = r.u32();
    spec.class_labels.push_back(r.str(len));
  }
  if (!r.at_end()) r.fail("trailing bytes after class labels");
  return spec;
}

using nlohmann::json;

std::vector<float> json_floats(const json& j, const char* key, std::size_t index) {
  if (!j.contains(key)) {
    throw Error(ErrorKind::ModelLoad, "layer " + std::to_string(index) + ": missing '" + key + "'");
  }
  return j.at(key).get<std::vector<float>>();
}

ClassifierSpec decode_json(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ModelLoad, source + ": JSON parse error: " + e.what());
  }
  ClassifierSpec spec;
  try {
    spec.input_size = root.at("input_size").get<int>();
    spec.input_channels = root.value("input_channels", 3);
    spec.class_labels = root.at("class_labels").get<std::vector<std::string>>();
    int channels = spec.input_channels;
    const auto& layers = root.at("layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const json& l = layers[i];
      const std::string kind = l.at("kind").get<std::string>();
      // Omitted input sizes are inferred from the running shape; layer_shapes
      // re-checks everything afterwards.
      if (kind == "conv") {
        ConvLayer c;
        c.out_channels = l.at("out_channels").get<int>();
        c.in_channels = l.value("in_channels", channels);
        const auto kernel = l.at("kernel").get<std::vector<int>>();
        if (kernel.size() != 2) throw Error(ErrorKind::ModelLoad, "layer " + std::to_string(i) + ": kernel must be [h, w]");
        c.kernel_h = kernel[0];
        c.kernel_w = kernel[1];
        c.stride = l.value("stride", 1);
        c.padding = l.value("padding", 0);
        c.weights = json_floats(l, "weights", i);
        c.bias = json_floats(l, "bias", i);
        channels = c.out_channels;
        spec.layers.emplace_back(std::move(c));
      } else if (kind == "relu") {
        spec.layers.emplace_back(ReluLayer{});
      } else if (kind == "maxpool") {
        spec.layers.emplace_back(MaxPoolLayer{l.value("window", 2), l.value("stride", 2)});
      } else if (kind == "flatten") {
        spec.layers.emplace_back(FlattenLayer{});
      } else if (kind == "dense") {
        DenseLayer d;
        d.out_features = l.at("out_features").get<int>();
        d.in_features = l.value("in_features", -1);
        d.weights = json_floats(l, "weights", i);
        d.bias = json_floats(l, "bias", i);
        channels = d.out_features;
        spec.layers.emplace_back(std::move(d));
      } else {
        throw Error(ErrorKind::ModelLoad, "layer " + std::to_string(i) + ": unknown layer kind '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ModelLoad, source + ": " + e.what());
  }
  // Fill inferred dense input sizes from the running shape.
  TensorShape cur{spec.input_channels, spec.input_size, spec.input_size};
  for (auto& layer : spec.layers) {
    if (auto* c = std::get_if<ConvLayer>(&layer)) {
      const int stride = std::max(c->stride, 1);
      cur = {c->out_channels, (cur.height + 2 * c->padding - c->kernel_h) / stride + 1,
             (cur.width + 2 * c->padding - c->kernel_w) / stride + 1};
    } else if (auto* p = std::get_if<MaxPoolLayer>(&layer)) {
      const int stride = std::max(p->stride, 1);
      cur = {cur.channels, (cur.height - p->window) / stride + 1, (cur.width - p->window) / stride + 1};
    } else if (std::holds_alternative<FlattenLayer>(layer)) {
      cur = {static_cast<int>(cur.size()), 1, 1};
    } else if (auto* d = std::get_if<DenseLayer>(&layer)) {
      if (d->in_features < 0) d->in_features = static_cast<int>(cur.size());
      cur = {d->out_features, 1, 1};
    }
  }
  return spec;
}

json layer_to_json(const LayerSpec& layer, bool include_weights) {
  json j;
  j["kind"] = layer_kind_name(layer);
  if (const auto* c = std::get_if<ConvLayer>(&layer)) {
    j["out_channels"] = c->out_channels;
    j["in_channels"] = c->in_channels;
    j["kernel"] = {c->kernel_h, c->kernel_w};
    j["stride"] = c->stride;
    j["padding"] = c->padding;
    if (include_weights) {
      j["weights"] = c->weights;
      j["bias"] = c->bias;
    }
  } else if (const auto* p = std::get_if<MaxPoolLayer>(&layer)) {
    j["window"] = p->window;
    j["stride"] = p->stride;
  } else if (const auto* d = std::get_if<DenseLayer>(&layer)) {
    j["out_features"] = d->out_features;
    j["in_features"] = d->in_features;
    if (include_weights) {
      j["weights"] = d->weights;
      j["bias"] = d->bias;
    }
  }
  return j;
}

}  // namespace

ClassifierSpec decode_spec(const std::string& bytes, const std::string& source) {
  ClassifierSpec spec = bytes.rfind("LCNN", 0) == 0 ? decode_binary(bytes, source) : decode_json(bytes, source);
  try {
    validate(spec);
  } catch (const Error& e) {
    throw Error(ErrorKind::ModelLoad, source + ": " + e.what());
  }
  return spec;
}

ClassifierSpec load_spec(const std::string& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::ModelLoad, e.what());
  }
  return decode_spec(bytes, path);
}

std::string encode_spec_binary(const ClassifierSpec& spec) {
  validate(spec);
  Writer w;
  w.bytes("LCNN");
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(spec.layers.size()));
  w.u32(static_cast<std::uint32_t>(spec.input_size));
  w.u32(static_cast<std::uint32_t>(spec.input_channels));
  for (const LayerSpec& layer : spec.layers) {
    if (const auto* c = std::get_if<ConvLayer>(&layer)) {
      w.u8(static_cast<std::uint8_t>(Tag::Conv));
      for (const int d : {c->out_channels, c->in_channels, c->kernel_h, c->kernel_w, c->stride, c->padding}) {
        w.u32(static_cast<std::uint32_t>(d));
      }
      w.f32s(c->weights);
      w.f32s(c->bias);
    } else if (std::holds_alternative<ReluLayer>(layer)) {
      w.u8(static_cast<std::uint8_t>(Tag::Relu));
    } else if (const auto* p = std::get_if<MaxPoolLayer>(&layer)) {
      w.u8(static_cast<std::uint8_t>(Tag::MaxPool));
      w.u32(static_cast<std::uint32_t>(p->window));
      w.u32(static_cast<std::uint32_t>(p->stride));
    } else if (std::holds_alternative<FlattenLayer>(layer)) {
      w.u8(static_cast<std::uint8_t>(Tag::Flatten));
    } else if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      w.u8(static_cast<std::uint8_t>(Tag::Dense));
      w.u32(static_cast<std::uint32_t>(d->out_features));
      w.u32(static_cast<std::uint32_t>(d->in_features));
      w.f32s(d->weights);
      w.f32s(d->bias);
    }
  }
  w.u32(static_cast<std::uint32_t>(spec.class_labels.size()));
  for (const auto& label : spec.class_labels) {
    w.u32(static_cast<std::uint32_t>(label.size()));
    w.bytes(label);
  }
  return w.take();
}

std::string encode_spec_json(const ClassifierSpec& spec, bool include_weights) {
  json root;
  root["format"] = "lcnn-json";
  root["version"] = kVersion;
  root["input_size"] = spec.input_size;
  root["input_channels"] = spec.input_channels;
  root["class_labels"] = spec.class_labels;
  root["layers"] = json::array();
  for (const auto& layer : spec.layers) root["layers"].push_back(layer_to_json(layer, include_weights));
  return root.dump(2) + "\n";
}

void save_spec(const ClassifierSpec& spec, const std::string& path) {
  const bool json_out = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  write_file_atomic(path, json_out ? encode_spec_json(spec) : encode_spec_binary(spec));
}

}  // namespace leafattack
