#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "leafattack/maskgen.hpp"
#include "leafattack/metrics.hpp"

namespace leafattack::cli {

/// Process exit codes. The numeric values are part of the interface.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitMaskGeneration = 2,
  kExitClassifier = 3,
  kExitNoCandidates = 4,
};

struct MaskgenArgs {
  std::string image;
  std::string output;
  EdgeParams edge;
};

/// Writes the mask and prints "area=<n> bbox=<x>,<y>,<w>,<h>".
int cmd_maskgen(const MaskgenArgs& args, std::ostream& out, std::ostream& err);

struct AttackArgs {
  std::string config;
  /// Overrides output_dir from the config when set.
  std::optional<std::string> output_dir;
};

/// For every (sign, leaf) pair writes <stem>.json, <stem>.csv and, when a
/// candidate exists, <stem>.png; then table1.csv and manifest.json.
int cmd_attack(const AttackArgs& args, std::ostream& out, std::ostream& err);

struct ClassifyArgs {
  std::string image;
  std::optional<std::string> model;
  std::optional<std::string> config;
  std::optional<std::string> mask;
  bool json = false;
};

int cmd_classify(const ClassifyArgs& args, std::ostream& out, std::ostream& err);

struct MetricsArgs {
  std::string image;
  std::optional<std::string> region;
  std::optional<std::string> name;
  std::string format = "json";
  std::optional<std::string> output;
  EdgeParams edge;
  bool circular = false;
};

int cmd_metrics(const MetricsArgs& args, std::ostream& out, std::ostream& err);

struct CompareArgs {
  std::string base;
  std::vector<std::string> adversarial;
  std::optional<std::string> output;
};

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);

struct ReportArgs {
  std::vector<std::string> reports;
  std::optional<std::string> output;
};

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

struct InitModelArgs {
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_init_model(const InitModelArgs& args, std::ostream& out, std::ostream& err);

/// File-name-safe version of "<sign> <species>".
std::string output_stem(const std::string& sign_name, const std::string& species);

}  // namespace leafattack::cli
