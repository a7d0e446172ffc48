#include "leafattack/cli/commands.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <ostream>

#include "json.hpp"
#include "leafattack/attack.hpp"
#include "leafattack/attack_report.hpp"
#include "leafattack/classifier.hpp"
#include "leafattack/cli/run_config.hpp"
#include "leafattack/error.hpp"
#include "leafattack/image_io.hpp"
#include "leafattack/metrics_io.hpp"

namespace leafattack::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(const std::string& text, const std::optional<std::string>& path, std::ostream& out) {
  if (path) {
    write_file_atomic(*path, text);
  } else {
    out << text;
  }
}

int resolve_label(const SignEntry& s, const Classifier& clf) {
  if (const int* i = std::get_if<int>(&s.label)) return *i;
  const std::string& name = std::get<std::string>(s.label);
  const auto& labels = clf.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == name) return static_cast<int>(i);
  }
  throw Error(ErrorKind::Config, "sign '" + s.name + "': label '" + name + "' is not a classifier class");
}

}  // namespace

std::string output_stem(const std::string& sign_name, const std::string& species) {
  std::string stem;
  for (const char c : sign_name + "_" + species) {
    const auto u = static_cast<unsigned char>(c);
    stem += std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_';
  }
  return stem;
}

int cmd_maskgen(const MaskgenArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const RasterImage img = read_image(args.image);
    RasterImage rgb = img;
    if (img.channels() == 1) {
      rgb = RasterImage(img.width(), img.height(), 3);
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
          for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = img.at(x, y);
        }
      }
    }
    const BinaryMask mask = generate_leaf_mask(rgb, args.edge);
    write_mask(mask, args.output);
    const PixelBox b = *mask.bounding_box();
    out << "area=" << mask.area() << " bbox=" << b.x << "," << b.y << "," << b.width << "," << b.height << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "maskgen: " << e.what() << "\n";
    return e.kind() == ErrorKind::MaskGeneration ? kExitMaskGeneration : kExitFailure;
  }
}

int cmd_attack(const AttackArgs& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_run_config(args.config);
  } catch (const Error& e) {
    err << "attack: " << e.what() << "\n";
    return kExitFailure;
  }
  if (args.output_dir) cfg.output_dir = *args.output_dir;

  std::unique_ptr<Classifier> clf;
  try {
    clf = make_classifier(cfg);
  } catch (const Error& e) {
    err << "attack: classifier: " << e.what() << "\n";
    return kExitClassifier;
  }

  std::vector<SignInstance> signs;
  std::vector<LeafAsset> leaves;
  try {
    for (const auto& s : cfg.signs) {
      SignInstance inst{s.name, read_image(s.image), read_mask(s.mask), resolve_label(s, *clf)};
      if (inst.image.channels() != 3) throw Error(ErrorKind::InvalidInput, "sign '" + s.name + "' must be RGB");
      validate(inst, clf->class_count());
      signs.push_back(std::move(inst));
    }
  } catch (const Error& e) {
    err << "attack: " << e.what() << "\n";
    return kExitFailure;
  }
  for (const auto& l : cfg.leaves) {
    try {
      leaves.push_back(make_leaf_asset(l.species, l.image, l.mask, cfg.edge));
    } catch (const Error& e) {
      err << "attack: leaf " << to_string(l.species) << ": " << e.what() << "\n";
      return e.kind() == ErrorKind::MaskGeneration ? kExitMaskGeneration : kExitFailure;
    }
  }

  try {
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);
    std::string table = table1_csv_header();
    ordered_json pairs = ordered_json::array();
    std::size_t empty_pairs = 0;
    for (const auto& sign : signs) {
      for (const auto& leaf : leaves) {
        const AttackReport report = run_attack(cfg.attack, sign, leaf, *clf, cfg.edge);
        const std::string stem = output_stem(sign.name, to_string(leaf.species));
        const Table1Row row = table1_row(report);
        write_file_atomic((dir / (stem + ".json")).string(), attack_report_json(report));
        write_file_atomic((dir / (stem + ".csv")).string(), table1_csv_header() + table1_csv_line(row));
        table += table1_csv_line(row);
        ordered_json entry{{"sign", sign.name},
                           {"leaf_species", to_string(leaf.species)},
                           {"report", stem + ".json"},
                           {"csv", stem + ".csv"}};
        if (report.best) {
          write_image(render_candidate(sign, leaf, report.best->candidate), (dir / (stem + ".png")).string());
          entry["image"] = stem + ".png";
          out << sign.name << " + " << to_string(leaf.species) << ": " << row.predicted_label << " "
              << format_fixed2(row.confidence_percent) << "% " << (report.success() ? "success" : "no success")
              << " (" << report.candidates_evaluated << " candidates)\n";
        } else {
          ++empty_pairs;
          entry["image"] = nullptr;
          err << "attack: " << sign.name << " + " << to_string(leaf.species)
              << ": no placement fits inside the sign mask\n";
        }
        pairs.push_back(std::move(entry));
      }
    }
    write_file_atomic((dir / "table1.csv").string(), table);

    ordered_json manifest;
    manifest["tool"] = "leafattack";
    manifest["version"] = kVersion;
    manifest["created_utc"] = utc_timestamp();
    manifest["config_file"] = cfg.source;
    manifest["parameters"] = cfg.to_json();
    manifest["classifier"] = clf->describe();
    manifest["pairs"] = std::move(pairs);
    manifest["table1"] = "table1.csv";
    write_file_atomic((dir / "manifest.json").string(), manifest.dump(2) + "\n");

    if (empty_pairs == signs.size() * leaves.size()) {
      err << "attack: every (sign, leaf) pair had an empty candidate set\n";
      return kExitNoCandidates;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "attack: " << e.what() << "\n";
    return kExitFailure;
  } catch (const fs::filesystem_error& e) {
    err << "attack: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_classify(const ClassifyArgs& args, std::ostream& out, std::ostream& err) {
  if (args.model.has_value() == args.config.has_value()) {
    err << "classify: give exactly one of --model or --config\n";
    return kExitFailure;
  }
  std::unique_ptr<Classifier> clf;
  try {
    if (args.model) {
      clf = std::make_unique<CnnClassifier>(load_spec(*args.model));
    } else {
      clf = make_classifier(load_run_config(*args.config));
    }
  } catch (const Error& e) {
    err << "classify: classifier: " << e.what() << "\n";
    return e.kind() == ErrorKind::Config ? kExitFailure : kExitClassifier;
  }
  try {
    const RasterImage img = read_image(args.image);
    if (img.channels() != 3) throw Error(ErrorKind::InvalidInput, "classify expects an RGB image");
    const BinaryMask region = args.mask ? read_mask(*args.mask) : BinaryMask(img.width(), img.height(), true);
    const Probabilities p = clf->predict(img, region);
    const std::string& name = clf->labels().at(static_cast<std::size_t>(p.predicted));
    if (args.json) {
      ordered_json j{{"predicted_label", p.predicted},
                     {"predicted_label_name", name},
                     {"confidence_percent", p.confidence_percent},
                     {"probabilities", p.values}};
      out << j.dump(2) << "\n";
    } else {
      out << p.predicted << "\t" << name << "\t" << format_fixed2(p.confidence_percent) << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "classify: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_metrics(const MetricsArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.format != "json" && args.format != "csv") {
      throw Error(ErrorKind::InvalidParameter, "format must be json or csv");
    }
    const RasterImage img = read_image(args.image);
    std::optional<BinaryMask> region;
    if (args.region) region = read_mask(*args.region);
    NamedMetrics nm;
    nm.name = args.name ? *args.name : fs::path(args.image).stem().string();
    nm.metrics = edge_metrics(img, region, args.edge,
                              args.circular ? OrientationMean::Circular : OrientationMean::Arithmetic);
    const std::string text = args.format == "json" ? edge_metrics_json(nm, args.edge)
                                                   : table2_csv_header() + table2_csv_line(nm);
    emit(text, args.output, out);
    return kExitOk;
  } catch (const Error& e) {
    err << "metrics: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto base = load_metrics(args.base);
    std::vector<NamedMetrics> adv;
    for (const auto& path : args.adversarial) {
      auto rows = load_metrics(path);
      adv.insert(adv.end(), rows.begin(), rows.end());
    }
    if (adv.empty()) throw Error(ErrorKind::InvalidInput, "no adversarial rows");
    emit(table3_csv(compare_metrics(base, adv)), args.output, out);
    return kExitOk;
  } catch (const Error& e) {
    err << "compare: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  try {
    std::string table = table1_csv_header();
    for (const auto& path : args.reports) table += table1_csv_line(table1_row_from_json(read_file(path)));
    emit(table, args.output, out);
    return kExitOk;
  } catch (const Error& e) {
    err << "report: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_init_model(const InitModelArgs& args, std::ostream& out, std::ostream& err) {
  try {
    save_spec(lisa_cnn_architecture(args.seed), args.output);
    out << "wrote " << args.output << " (seed " << args.seed << ")\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "init-model: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace leafattack::cli
