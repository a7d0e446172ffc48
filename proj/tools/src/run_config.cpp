#include "leafattack/cli/run_config.hpp"

#include <filesystem>
#include <set>

#include "leafattack/cli/toml_lite.hpp"
#include "leafattack/error.hpp"
#include "leafattack/image_io.hpp"

namespace leafattack::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& what) {
  throw Error(ErrorKind::Config, source + ": " + what);
}

void reject_unknown(const ordered_json& table, std::initializer_list<const char*> allowed, const std::string& where,
                    const std::string& source) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : table.items()) {
    if (!ok.count(key)) fail(source, "unknown key '" + key + "' in " + where);
  }
}

double number(const ordered_json& v, const std::string& key, const std::string& source) {
  if (!v.is_number()) fail(source, "'" + key + "' must be a number");
  return v.get<double>();
}

int integer(const ordered_json& v, const std::string& key, const std::string& source) {
  if (!v.is_number_integer()) fail(source, "'" + key + "' must be an integer");
  return v.get<int>();
}

bool boolean(const ordered_json& v, const std::string& key, const std::string& source) {
  if (!v.is_boolean()) fail(source, "'" + key + "' must be true or false");
  return v.get<bool>();
}

std::string text(const ordered_json& v, const std::string& key, const std::string& source) {
  if (!v.is_string()) fail(source, "'" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const ordered_json& v, const std::string& key, const std::string& source) {
  if (!v.is_array()) fail(source, "'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(number(e, key, source));
  return out;
}

std::string existing_path(const ordered_json& v, const std::string& key, const fs::path& base,
                          const std::string& source) {
  fs::path p = text(v, key, source);
  if (p.is_relative()) p = base / p;
  p = p.lexically_normal();
  if (!fs::exists(p)) fail(source, "'" + key + "' refers to missing file " + p.string());
  return p.string();
}

}  // namespace

void apply_edge_overrides(EdgeParams& e, const ordered_json& t, const std::string& source) {
  reject_unknown(t, {"sigma", "canny_low", "canny_high", "dilate_radius", "dilate_iterations", "close_radius",
                     "shrink_to_outline"},
                 "[edge]", source);
  if (t.contains("sigma")) e.sigma = number(t["sigma"], "sigma", source);
  if (t.contains("canny_low")) e.canny_low = number(t["canny_low"], "canny_low", source);
  if (t.contains("canny_high")) e.canny_high = number(t["canny_high"], "canny_high", source);
  if (t.contains("dilate_radius")) e.dilate_radius = integer(t["dilate_radius"], "dilate_radius", source);
  if (t.contains("dilate_iterations")) {
    e.dilate_iterations = integer(t["dilate_iterations"], "dilate_iterations", source);
  }
  if (t.contains("close_radius")) e.close_radius = integer(t["close_radius"], "close_radius", source);
  if (t.contains("shrink_to_outline")) {
    e.shrink_to_outline = boolean(t["shrink_to_outline"], "shrink_to_outline", source);
  }
}

RunConfig parse_run_config(const std::string& body, const std::string& base_dir, const std::string& source) {
  const ordered_json root = parse_toml(body, source);
  const fs::path base = base_dir.empty() ? fs::path(".") : fs::path(base_dir);
  reject_unknown(root, {"output_dir", "classifier", "stub", "attack", "edge", "sign", "leaf"}, "top level", source);

  RunConfig cfg;
  cfg.source = source;
  if (!root.contains("output_dir")) fail(source, "missing 'output_dir'");
  {
    fs::path out = text(root["output_dir"], "output_dir", source);
    if (out.is_relative()) out = base / out;
    cfg.output_dir = out.lexically_normal().string();
  }

  if (root.contains("classifier") == root.contains("stub")) {
    fail(source, "exactly one of 'classifier' (weights path) or [stub] is required");
  }
  if (root.contains("classifier")) {
    cfg.classifier = existing_path(root["classifier"], "classifier", base, source);
  } else {
    const ordered_json& t = root["stub"];
    if (!t.is_object()) fail(source, "'stub' must be a table");
    reject_unknown(t, {"thresholds", "labels", "ramp"}, "[stub]", source);
    StubSpec s;
    if (!t.contains("thresholds") || !t.contains("labels")) fail(source, "[stub] needs thresholds and labels");
    s.thresholds = numbers(t["thresholds"], "thresholds", source);
    if (!t["labels"].is_array()) fail(source, "'labels' must be an array of strings");
    for (const auto& l : t["labels"]) s.labels.push_back(text(l, "labels", source));
    if (t.contains("ramp")) s.ramp = number(t["ramp"], "ramp", source);
    cfg.classifier = std::move(s);
  }

  if (root.contains("attack")) {
    const ordered_json& t = root["attack"];
    if (!t.is_object()) fail(source, "'attack' must be a table");
    reject_unknown(t, {"patch_ratios", "angles_deg", "grid_stride", "bbox_containment", "seed", "threads", "keep_log"},
                   "[attack]", source);
    AttackConfig& a = cfg.attack;
    if (t.contains("patch_ratios")) a.patch_ratios = numbers(t["patch_ratios"], "patch_ratios", source);
    if (t.contains("angles_deg")) a.angles_deg = numbers(t["angles_deg"], "angles_deg", source);
    if (t.contains("grid_stride")) a.grid_stride = integer(t["grid_stride"], "grid_stride", source);
    if (t.contains("bbox_containment")) {
      a.bbox_containment = boolean(t["bbox_containment"], "bbox_containment", source);
    }
    if (t.contains("seed")) {
      if (!t["seed"].is_number_integer() || t["seed"].get<long long>() < 0) {
        fail(source, "'seed' must be a non-negative integer");
      }
      a.seed = t["seed"].get<std::uint64_t>();
    }
    if (t.contains("threads")) a.threads = integer(t["threads"], "threads", source);
    if (t.contains("keep_log")) a.keep_log = boolean(t["keep_log"], "keep_log", source);
  }
  try {
    cfg.attack.validate();
  } catch (const Error& e) {
    fail(source, e.what());
  }

  if (root.contains("edge")) {
    if (!root["edge"].is_object()) fail(source, "'edge' must be a table");
    apply_edge_overrides(cfg.edge, root["edge"], source);
  }
  try {
    cfg.edge.validate();
  } catch (const Error& e) {
    fail(source, e.what());
  }

  if (!root.contains("sign") || !root["sign"].is_array() || root["sign"].empty()) {
    fail(source, "at least one [[sign]] entry is required");
  }
  std::set<std::string> names;
  for (const auto& t : root["sign"]) {
    reject_unknown(t, {"name", "image", "mask", "label"}, "[[sign]]", source);
    for (const char* k : {"name", "image", "mask", "label"}) {
      if (!t.contains(k)) fail(source, std::string("[[sign]] entry missing '") + k + "'");
    }
    SignEntry s;
    s.name = text(t["name"], "name", source);
    if (s.name.empty()) fail(source, "sign name must not be empty");
    if (!names.insert(s.name).second) fail(source, "duplicate sign name '" + s.name + "'");
    s.image = existing_path(t["image"], "image", base, source);
    s.mask = existing_path(t["mask"], "mask", base, source);
    if (t["label"].is_number_integer()) {
      s.label = t["label"].get<int>();
    } else {
      s.label = text(t["label"], "label", source);
    }
    cfg.signs.push_back(std::move(s));
  }

  if (!root.contains("leaf") || !root["leaf"].is_array() || root["leaf"].empty()) {
    fail(source, "at least one [[leaf]] entry is required");
  }
  std::set<LeafSpecies> species;
  for (const auto& t : root["leaf"]) {
    reject_unknown(t, {"species", "image", "mask"}, "[[leaf]]", source);
    if (!t.contains("species") || !t.contains("image")) fail(source, "[[leaf]] entry needs species and image");
    LeafEntry l;
    try {
      l.species = parse_species(text(t["species"], "species", source));
    } catch (const Error& e) {
      fail(source, e.what());
    }
    if (!species.insert(l.species).second) fail(source, "duplicate leaf species '" + to_string(l.species) + "'");
    l.image = existing_path(t["image"], "image", base, source);
    if (t.contains("mask")) l.mask = existing_path(t["mask"], "mask", base, source);
    cfg.leaves.push_back(std::move(l));
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::string body;
  try {
    body = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  return parse_run_config(body, fs::path(path).parent_path().string(), path);
}

std::unique_ptr<Classifier> make_classifier(const RunConfig& cfg) {
  if (const auto* path = std::get_if<std::string>(&cfg.classifier)) {
    try {
      return std::make_unique<CnnClassifier>(load_spec(*path));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ModelLoad) throw;
      throw Error(ErrorKind::ModelLoad, e.what());
    }
  }
  const auto& s = std::get<StubSpec>(cfg.classifier);
  try {
    return std::make_unique<StubClassifier>(s.thresholds, s.labels, s.ramp);
  } catch (const Error& e) {
    throw Error(ErrorKind::ModelLoad, std::string("stub: ") + e.what());
  }
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["output_dir"] = output_dir;
  if (const auto* path = std::get_if<std::string>(&classifier)) {
    j["classifier"] = *path;
  } else {
    const auto& s = std::get<StubSpec>(classifier);
    j["stub"] = {{"thresholds", s.thresholds}, {"labels", s.labels}, {"ramp", s.ramp}};
  }
  j["attack"] = {{"patch_ratios", attack.patch_ratios}, {"angles_deg", attack.angles_deg},
                 {"grid_stride", attack.grid_stride},   {"bbox_containment", attack.bbox_containment},
                 {"seed", attack.seed},                 {"threads", attack.threads},
                 {"keep_log", attack.keep_log}};
  j["edge"] = {{"sigma", edge.sigma},
               {"canny_low", edge.canny_low},
               {"canny_high", edge.canny_high},
               {"dilate_radius", edge.dilate_radius},
               {"dilate_iterations", edge.dilate_iterations},
               {"close_radius", edge.close_radius},
               {"shrink_to_outline", edge.shrink_to_outline}};
  ordered_json signs_j = ordered_json::array();
  for (const auto& s : signs) {
    ordered_json e{{"name", s.name}, {"image", s.image}, {"mask", s.mask}};
    if (const int* i = std::get_if<int>(&s.label)) {
      e["label"] = *i;
    } else {
      e["label"] = std::get<std::string>(s.label);
    }
    signs_j.push_back(std::move(e));
  }
  j["sign"] = std::move(signs_j);
  ordered_json leaves_j = ordered_json::array();
  for (const auto& l : leaves) {
    ordered_json e{{"species", to_string(l.species)}, {"image", l.image}};
    if (l.mask) e["mask"] = *l.mask;
    leaves_j.push_back(std::move(e));
  }
  j["leaf"] = std::move(leaves_j);
  return j;
}

}  // namespace leafattack::cli
