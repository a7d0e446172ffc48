#pragma once

#include <optional>
#include <string>
#include <vector>

#include "leafattack/metrics.hpp"

namespace leafattack {

struct NamedMetrics {
  std::string name;
  EdgeMetrics metrics;
  /// Attack outcome for adversarial rows.
  std::optional<bool> success;
  /// Name of the baseline row this adversarial row is compared against.
  std::optional<std::string> base;
};

std::string edge_metrics_json(const NamedMetrics& m, const EdgeParams& params);

std::string table2_csv_header();
std::string table2_csv_line(const NamedMetrics& m);

/// Accepts a JSON object, a JSON array of objects, or CSV with a header row.
/// CSV columns are matched by name: an image-name column ("Test Image",
/// "Adversarial Image" or "Image"), "Edge Length", "Orientation", "Intensity",
/// "Center of Gravity", and optionally "Attack Success" (Yes/No) and
/// "Base Image". Names ending in " (S)" / " (U)" set the success flag when no
/// explicit column does.
std::vector<NamedMetrics> parse_metrics(const std::string& text, const std::string& source = "<memory>");
std::vector<NamedMetrics> load_metrics(const std::string& path);

struct ComparisonRow {
  std::string name;
  EdgeMetrics adversarial;
  MetricsDelta delta;
  bool success = false;
};

/// Pairs every adversarial row with its baseline. A row's `base` field picks
/// the baseline by name; otherwise the baseline whose name is a prefix of the
/// row name (longest wins); otherwise the only baseline, if there is one.
std::vector<ComparisonRow> compare_metrics(const std::vector<NamedMetrics>& baselines,
                                           const std::vector<NamedMetrics>& adversarial);

/// Table-3 layout: per-row metrics and deltas, then the cohort average rows.
std::string table3_csv(const std::vector<ComparisonRow>& rows);

/// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace leafattack
