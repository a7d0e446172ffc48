#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "leafattack/attack.hpp"
#include "leafattack/classifier.hpp"
#include "leafattack/maskgen.hpp"

namespace leafattack::cli {

struct StubSpec {
  std::vector<double> thresholds;
  std::vector<std::string> labels;
  double ramp = 32.0;
};

struct SignEntry {
  std::string name;
  std::string image;
  std::string mask;
  /// Class index, or a class name resolved against the classifier labels.
  std::variant<int, std::string> label;
};

struct LeafEntry {
  LeafSpecies species = LeafSpecies::Maple;
  std::string image;
  std::optional<std::string> mask;
};

/// A parsed run config. Paths are already resolved against the config
/// file's directory.
struct RunConfig {
  std::string source;
  std::string output_dir;
  std::variant<std::string, StubSpec> classifier;
  AttackConfig attack;
  EdgeParams edge;
  std::vector<SignEntry> signs;
  std::vector<LeafEntry> leaves;

  /// Every parameter, defaults included, as the manifest records it.
  nlohmann::ordered_json to_json() const;
};

/// Throws ErrorKind::Config for malformed files, unknown keys, missing
/// required keys, or referenced files that do not exist.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text, const std::string& base_dir,
                           const std::string& source = "<memory>");

/// Builds the classifier the config names. Throws ErrorKind::ModelLoad (or
/// InvalidParameter for a bad stub) when that fails.
std::unique_ptr<Classifier> make_classifier(const RunConfig& cfg);

/// `[edge]`-style overrides applied onto `params`.
void apply_edge_overrides(EdgeParams& params, const nlohmann::ordered_json& table, const std::string& source);

}  // namespace leafattack::cli
