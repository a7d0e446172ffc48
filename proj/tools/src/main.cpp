#include <iostream>

#include "CLI11.hpp"
#include "leafattack/cli/commands.hpp"

namespace {

using namespace leafattack;
using namespace leafattack::cli;

void add_edge_options(CLI::App* cmd, EdgeParams& e) {
  cmd->add_option("--sigma", e.sigma, "Gaussian sigma")->capture_default_str();
  cmd->add_option("--canny-low", e.canny_low, "Canny low threshold")->capture_default_str();
  cmd->add_option("--canny-high", e.canny_high, "Canny high threshold")->capture_default_str();
  cmd->add_option("--dilate-radius", e.dilate_radius)->capture_default_str();
  cmd->add_option("--dilate-iterations", e.dilate_iterations)->capture_default_str();
  cmd->add_option("--close-radius", e.close_radius)->capture_default_str();
  cmd->add_flag("!--no-shrink", e.shrink_to_outline, "Keep the thickened outline in the mask");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leaf-occlusion attacks on traffic-sign classifiers and edge forensics"};
  app.require_subcommand(1);
  int code = kExitOk;

  MaskgenArgs mg;
  auto* maskgen = app.add_subcommand("maskgen", "Generate a leaf mask from a leaf photo");
  maskgen->add_option("image", mg.image, "Leaf image (PNG/PGM/PPM)")->required();
  maskgen->add_option("-o,--output", mg.output, "Output mask (.pgm or .png)")->required();
  add_edge_options(maskgen, mg.edge);
  maskgen->callback([&] { code = cmd_maskgen(mg, std::cout, std::cerr); });

  AttackArgs at;
  auto* attack = app.add_subcommand("attack", "Run the placement search for every sign and leaf in a config");
  attack->add_option("config", at.config, "Run config (TOML)")->required();
  attack->add_option("-o,--output-dir", at.output_dir, "Override output_dir from the config");
  attack->callback([&] { code = cmd_attack(at, std::cout, std::cerr); });

  ClassifyArgs cl;
  auto* classify = app.add_subcommand("classify", "Classify one image");
  classify->add_option("image", cl.image, "RGB image")->required();
  auto* model_opt = classify->add_option("--model", cl.model, "Weight file (binary or JSON)");
  classify->add_option("--config", cl.config, "Run config naming the classifier")->excludes(model_opt);
  classify->add_option("--mask", cl.mask, "Sign mask of the image");
  classify->add_flag("--json", cl.json, "Print JSON with all probabilities");
  classify->callback([&] { code = cmd_classify(cl, std::cout, std::cerr); });

  MetricsArgs me;
  auto* metrics = app.add_subcommand("metrics", "Edge metrics of one image");
  metrics->add_option("image", me.image, "Image")->required();
  metrics->add_option("--region", me.region, "Restrict edges to this mask");
  metrics->add_option("--name", me.name, "Row name (default: file stem)");
  metrics->add_option("--format", me.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  metrics->add_option("-o,--output", me.output, "Write here instead of stdout");
  metrics->add_flag("--circular", me.circular, "Circular mean of gradient angles");
  add_edge_options(metrics, me.edge);
  metrics->callback([&] { code = cmd_metrics(me, std::cout, std::cerr); });

  CompareArgs cm;
  auto* compare = app.add_subcommand("compare", "Deltas of adversarial metrics against baselines");
  compare->add_option("--base", cm.base, "Baseline metrics (JSON or CSV)")->required();
  compare->add_option("--adv", cm.adversarial, "Adversarial metrics (JSON or CSV); repeatable")->required();
  compare->add_option("-o,--output", cm.output, "Write here instead of stdout");
  compare->callback([&] { code = cmd_compare(cm, std::cout, std::cerr); });

  ReportArgs rp;
  auto* report = app.add_subcommand("report", "Summarize attack JSON reports as one CSV");
  report->add_option("reports", rp.reports, "Report JSON files")->required();
  report->add_option("-o,--output", rp.output, "Write here instead of stdout");
  report->callback([&] { code = cmd_report(rp, std::cout, std::cerr); });

  InitModelArgs im;
  auto* init = app.add_subcommand("init-model", "Write randomly initialized weights for the default architecture");
  init->add_option("-o,--output", im.output, "Weight file (.json for JSON, else binary)")->required();
  init->add_option("--seed", im.seed, "Generator seed")->capture_default_str();
  init->callback([&] { code = cmd_init_model(im, std::cout, std::cerr); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return code;
}
