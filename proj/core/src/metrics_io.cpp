#include "leafattack/metrics_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <json.hpp>
#include <sstream>

#include "leafattack/attack_report.hpp"
#include "leafattack/error.hpp"
#include "leafattack/image_io.hpp"

namespace leafattack {

using nlohmann::ordered_json;

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void parse_fail(const std::string& source, const std::string& what) {
  throw Error(ErrorKind::Io, source + ": " + what);
}

double parse_number(const std::string& text, const std::string& source) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) parse_fail(source, "bad number '" + text + "'");
  return v;
}

Point2 parse_point(const std::string& text, const std::string& source) {
  std::string t = trim(text);
  if (t.size() < 5 || t.front() != '(' || t.back() != ')') parse_fail(source, "bad point '" + text + "'");
  t = t.substr(1, t.size() - 2);
  const auto comma = t.find(',');
  if (comma == std::string::npos) parse_fail(source, "bad point '" + text + "'");
  return {parse_number(t.substr(0, comma), source), parse_number(t.substr(comma + 1), source)};
}

std::optional<bool> parse_success(const std::string& text, const std::string& source) {
  const std::string t = lower(trim(text));
  if (t.empty()) return std::nullopt;
  if (t == "yes" || t == "s" || t == "true" || t == "1") return true;
  if (t == "no" || t == "u" || t == "false" || t == "0") return false;
  parse_fail(source, "bad success flag '" + text + "'");
}

// "Stop Maple (S)" -> ("Stop Maple", true)
void apply_name_suffix(NamedMetrics& m) {
  for (const auto& [suffix, flag] : {std::pair{std::string(" (S)"), true}, std::pair{std::string(" (U)"), false}}) {
    if (m.name.size() > suffix.size() && m.name.compare(m.name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      m.name.resize(m.name.size() - suffix.size());
      if (!m.success) m.success = flag;
      return;
    }
  }
}

NamedMetrics from_json(const ordered_json& j, const std::string& source) {
  try {
    NamedMetrics m;
    m.name = j.value("name", std::string());
    const double len = j.at("edge_length").get<double>();
    if (len > 0) {
      const auto& cog = j.at("center_of_gravity");
      m.metrics = EdgeMetrics::from_values(len, j.at("orientation_deg").get<double>(),
                                           j.at("intensity").get<double>(),
                                           Point2{cog.at(0).get<double>(), cog.at(1).get<double>()});
    }
    m.metrics.components = j.value("components", std::size_t{0});
    if (j.contains("success") && !j.at("success").is_null()) m.success = j.at("success").get<bool>();
    if (j.contains("base") && !j.at("base").is_null()) m.base = j.at("base").get<std::string>();
    apply_name_suffix(m);
    return m;
  } catch (const nlohmann::json::exception& e) {
    parse_fail(source, std::string("malformed metrics JSON: ") + e.what());
  }
}

std::vector<NamedMetrics> parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) parse_fail(source, "empty CSV");
  int name_col = -1, len_col = -1, ori_col = -1, int_col = -1, cog_col = -1, succ_col = -1, base_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = lower(trim(header[i]));
    const int c = static_cast<int>(i);
    if (h == "test image" || h == "adversarial image" || h == "image" || h == "name") name_col = c;
    else if (h == "edge length") len_col = c;
    else if (h == "orientation") ori_col = c;
    else if (h == "intensity") int_col = c;
    else if (h == "center of gravity") cog_col = c;
    else if (h == "attack success") succ_col = c;
    else if (h == "base image") base_col = c;
  }
  if (name_col < 0 || len_col < 0 || ori_col < 0 || int_col < 0 || cog_col < 0) {
    parse_fail(source, "CSV header lacks one of: image name, Edge Length, Orientation, Intensity, Center of Gravity");
  }
  std::vector<NamedMetrics> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    const std::string where = source + ":" + std::to_string(line_no);
    auto field = [&](int col) -> std::string {
      if (col < 0) return {};
      if (static_cast<std::size_t>(col) >= f.size()) parse_fail(where, "missing column");
      return f[static_cast<std::size_t>(col)];
    };
    NamedMetrics m;
    m.name = trim(field(name_col));
    // Cohort rows are derived, never inputs.
    if (lower(m.name).rfind("average all", 0) == 0) continue;
    const double len = parse_number(field(len_col), where);
    if (len > 0) {
      m.metrics = EdgeMetrics::from_values(len, parse_number(field(ori_col), where),
                                           parse_number(field(int_col), where), parse_point(field(cog_col), where));
    }
    if (succ_col >= 0) m.success = parse_success(field(succ_col), where);
    if (base_col >= 0 && !trim(field(base_col)).empty()) m.base = trim(field(base_col));
    apply_name_suffix(m);
    rows.push_back(std::move(m));
  }
  return rows;
}

std::string format_point(const Point2& p) {
  return "(" + format_fixed2(p.x) + ", " + format_fixed2(p.y) + ")";
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string edge_metrics_json(const NamedMetrics& m, const EdgeParams& params) {
  ordered_json j;
  j["name"] = m.name;
  j["edge_length"] = m.metrics.edge_length;
  j["orientation_deg"] = m.metrics.orientation_deg ? ordered_json(*m.metrics.orientation_deg) : ordered_json(nullptr);
  j["intensity"] = m.metrics.intensity ? ordered_json(*m.metrics.intensity) : ordered_json(nullptr);
  if (m.metrics.center_of_gravity) {
    j["center_of_gravity"] = {m.metrics.center_of_gravity->x, m.metrics.center_of_gravity->y};
  } else {
    j["center_of_gravity"] = nullptr;
  }
  j["components"] = m.metrics.components;
  if (m.success) j["success"] = *m.success;
  if (m.base) j["base"] = *m.base;
  ordered_json edge;
  edge["sigma"] = params.sigma;
  edge["canny_low"] = params.canny_low;
  edge["canny_high"] = params.canny_high;
  j["edge_params"] = edge;
  return j.dump(2) + "\n";
}

std::string table2_csv_header() { return "Test Image,Edge Length,Orientation,Intensity,Center of Gravity\n"; }

std::string table2_csv_line(const NamedMetrics& m) {
  const EdgeMetrics& e = m.metrics;
  std::string line = csv_field(m.name) + "," + std::to_string(e.edge_length) + ",";
  line += (e.orientation_deg ? format_fixed2(*e.orientation_deg) : "") + ",";
  line += (e.intensity ? format_fixed2(*e.intensity) : "") + ",";
  line += e.center_of_gravity ? csv_field(format_point(*e.center_of_gravity)) : "";
  return line + "\n";
}

std::vector<NamedMetrics> parse_metrics(const std::string& text, const std::string& source) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    ordered_json j;
    try {
      j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      parse_fail(source, std::string("JSON parse error: ") + e.what());
    }
    std::vector<NamedMetrics> out;
    if (j.is_array()) {
      for (const auto& item : j) out.push_back(from_json(item, source));
    } else {
      out.push_back(from_json(j, source));
    }
    return out;
  }
  return parse_csv(text, source);
}

std::vector<NamedMetrics> load_metrics(const std::string& path) { return parse_metrics(read_file(path), path); }

std::vector<ComparisonRow> compare_metrics(const std::vector<NamedMetrics>& baselines,
                                           const std::vector<NamedMetrics>& adversarial) {
  if (baselines.empty()) throw Error(ErrorKind::InvalidInput, "compare: no baseline metrics");
  std::vector<ComparisonRow> rows;
  for (const auto& adv : adversarial) {
    const NamedMetrics* base = nullptr;
    if (adv.base) {
      for (const auto& b : baselines) {
        if (b.name == *adv.base) base = &b;
      }
      if (!base) throw Error(ErrorKind::InvalidInput, "compare: no baseline named '" + *adv.base + "'");
    } else {
      for (const auto& b : baselines) {
        const bool prefix = adv.name.size() > b.name.size() && adv.name.compare(0, b.name.size(), b.name) == 0 &&
                            adv.name[b.name.size()] == ' ';
        if ((prefix || adv.name == b.name) && (!base || b.name.size() > base->name.size())) base = &b;
      }
      if (!base && baselines.size() == 1) base = &baselines.front();
      if (!base) throw Error(ErrorKind::InvalidInput, "compare: cannot match '" + adv.name + "' to a baseline");
    }
    ComparisonRow row;
    row.name = adv.name;
    row.adversarial = adv.metrics;
    row.delta = metrics_delta(base->metrics, adv.metrics);
    row.success = adv.success.value_or(false);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string table3_csv(const std::vector<ComparisonRow>& rows) {
  static const char* kColumns =
      "Edge Length,Orientation,Intensity,Center of Gravity,Edge Length Difference,Edge Length Percent,"
      "Orientation Difference,Orientation Percent,Intensity Difference,Intensity Percent,"
      "Center of Gravity Distance";
  std::string out = std::string("Adversarial Image,") + kColumns + "\n";
  auto delta_cols = [](const MetricsDelta& d) {
    return format_fixed2(d.edge_length_diff) + "," + format_fixed2(d.edge_length_percent) + "," +
           format_fixed2(d.orientation_diff) + "," + format_fixed2(d.orientation_percent) + "," +
           format_fixed2(d.intensity_diff) + "," + format_fixed2(d.intensity_percent) + "," +
           format_fixed2(d.cog_distance);
  };
  std::vector<CohortRow> cohort;
  for (const auto& r : rows) {
    const EdgeMetrics& m = r.adversarial;
    out += csv_field(r.name + (r.success ? " (S)" : " (U)")) + "," +
           format_fixed2(static_cast<double>(m.edge_length)) + "," + format_fixed2(*m.orientation_deg) + "," +
           format_fixed2(*m.intensity) + "," + csv_field(format_point(*m.center_of_gravity)) + "," +
           delta_cols(r.delta) + "\n";
    cohort.push_back({m, r.delta, r.success});
  }
  const CohortSplit split = cohort_averages(cohort);
  auto average_line = [&](const char* label, const CohortAverages& a) {
    return std::string(label) + "," + format_fixed2(a.edge_length) + "," + format_fixed2(a.orientation) + "," +
           format_fixed2(a.intensity) + "," + csv_field(format_point(a.center_of_gravity)) + "," +
           delta_cols(a.delta) + "\n";
  };
  if (split.successful) out += average_line("Average All Successful", *split.successful);
  if (split.unsuccessful) out += average_line("Average All Unsuccessful", *split.unsuccessful);
  return out;
}

}  // namespace leafattack
