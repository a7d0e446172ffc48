#include "leafattack/attack_report.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "leafattack/error.hpp"

namespace leafattack {

using nlohmann::ordered_json;

namespace {

ordered_json candidate_json(const PlacementCandidate& c) {
  ordered_json j;
  j["x"] = c.x;
  j["y"] = c.y;
  j["patch_ratio"] = c.patch_ratio;
  j["angle_deg"] = c.angle_deg;
  j["patch_side"] = c.patch_side;
  j["patch_width"] = c.patch_width;
  j["patch_height"] = c.patch_height;
  return j;
}

ordered_json outcome_json(const AttackOutcome& o, const std::vector<std::string>& labels) {
  ordered_json j;
  j["index"] = o.index;
  j["candidate"] = candidate_json(o.candidate);
  j["predicted_label"] = o.predicted_label;
  j["predicted_label_name"] = labels.at(static_cast<std::size_t>(o.predicted_label));
  j["confidence_percent"] = o.confidence_percent;
  j["true_label_probability"] = o.true_label_probability;
  j["success"] = o.success;
  return j;
}

}  // namespace

std::string format_fixed2(double value) {
  char buf[64];
  double rounded = std::round(value * 100.0) / 100.0;
  if (rounded == 0.0) rounded = 0.0;  // no "-0.00"
  std::snprintf(buf, sizeof buf, "%.2f", rounded);
  return buf;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string attack_report_json(const AttackReport& r) {
  ordered_json j;
  j["sign"] = r.sign_name;
  j["leaf_species"] = to_string(r.leaf_species);
  j["true_label"] = r.true_label;
  j["true_label_name"] = r.class_labels.at(static_cast<std::size_t>(r.true_label));
  j["attack_success"] = r.success();
  j["best_is_fallback"] = r.best_is_fallback;
  j["confidence_definition"] = "softmax probability of the predicted class x 100";
  if (r.best) {
    j["best"] = outcome_json(*r.best, r.class_labels);
  } else {
    j["best"] = nullptr;
  }
  j["candidates_evaluated"] = r.candidates_evaluated;
  j["successful_candidates"] = r.successful_candidates;

  ordered_json cfg;
  cfg["patch_ratios"] = r.config.patch_ratios;
  cfg["angles_deg"] = r.config.angles_deg;
  cfg["grid_stride"] = r.config.grid_stride;
  cfg["bbox_containment"] = r.config.bbox_containment;
  cfg["seed"] = r.config.seed;
  j["config"] = cfg;

  ordered_json edge;
  edge["sigma"] = r.edge_params.sigma;
  edge["canny_low"] = r.edge_params.canny_low;
  edge["canny_high"] = r.edge_params.canny_high;
  edge["dilate_radius"] = r.edge_params.dilate_radius;
  edge["dilate_iterations"] = r.edge_params.dilate_iterations;
  edge["close_radius"] = r.edge_params.close_radius;
  edge["shrink_to_outline"] = r.edge_params.shrink_to_outline;
  j["edge_params"] = edge;
  j["classifier"] = r.classifier_description;
  j["class_labels"] = r.class_labels;

  if (r.config.keep_log) {
    ordered_json log = ordered_json::array();
    for (const auto& o : r.log) log.push_back(outcome_json(o, r.class_labels));
    j["log"] = std::move(log);
  }
  return j.dump(2) + "\n";
}

Table1Row table1_row(const AttackReport& r) {
  Table1Row row;
  row.adversarial_image = r.sign_name;
  row.leaf_type = to_string(r.leaf_species);
  if (r.best) {
    row.predicted_label = r.class_labels.at(static_cast<std::size_t>(r.best->predicted_label));
    row.confidence_percent = r.best->confidence_percent;
  }
  row.attack_success = r.success();
  return row;
}

Table1Row table1_row_from_json(const std::string& json_text) {
  try {
    const auto j = ordered_json::parse(json_text);
    Table1Row row;
    row.adversarial_image = j.at("sign").get<std::string>();
    row.leaf_type = j.at("leaf_species").get<std::string>();
    if (!j.at("best").is_null()) {
      row.predicted_label = j.at("best").at("predicted_label_name").get<std::string>();
      row.confidence_percent = j.at("best").at("confidence_percent").get<double>();
    }
    row.attack_success = j.at("attack_success").get<bool>();
    return row;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed attack report: ") + e.what());
  }
}

std::string table1_csv_header() {
  return "Adversarial Image,Leaf Type,Predicted Label,Confidence Score (%),Attack Success\n";
}

std::string table1_csv_line(const Table1Row& row) {
  return csv_field(row.adversarial_image) + "," + csv_field(row.leaf_type) + "," +
         csv_field(row.predicted_label) + "," + format_fixed2(row.confidence_percent) + "," +
         (row.attack_success ? "Yes" : "No") + "\n";
}

}  // namespace leafattack
