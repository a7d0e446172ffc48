#pragma once

#include <string>

#include "leafattack/attack.hpp"

namespace leafattack {

/// Full report, including the parameter echo and (if kept) the candidate log.
std::string attack_report_json(const AttackReport& report);

/// One line per attack in the layout: Adversarial Image, Leaf Type,
/// Predicted Label, Confidence Score (%), Attack Success.
struct Table1Row {
  std::string adversarial_image;
  std::string leaf_type;
  std::string predicted_label;
  double confidence_percent = 0.0;
  bool attack_success = false;
};

Table1Row table1_row(const AttackReport& report);
/// Reads the summary fields back out of attack_report_json output.
Table1Row table1_row_from_json(const std::string& json_text);

std::string table1_csv_header();
std::string table1_csv_line(const Table1Row& row);

/// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(const std::string& text);
std::string format_fixed2(double value);

}  // namespace leafattack
