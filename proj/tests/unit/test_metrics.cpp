#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "leafattack/error.hpp"
#include "leafattack/image_io.hpp"
#include "leafattack/metrics.hpp"
#include "leafattack/metrics_io.hpp"
#include "synthetic.hpp"

namespace leafattack {
namespace {

const std::string kFixtures = LEAFATTACK_FIXTURE_DIR;

RasterImage square_scene() {
  return testing::render_dark_on_white(testing::rect_mask(96, 80, 30, 20, 36, 36));
}

TEST(EdgeMetrics, ConstantImageHasNoEdges) {
  const EdgeMetrics m = edge_metrics(RasterImage(40, 40, 3, 128));
  EXPECT_EQ(m.edge_length, 0u);
  EXPECT_FALSE(m.orientation_deg);
  EXPECT_FALSE(m.intensity);
  EXPECT_FALSE(m.center_of_gravity);
}

TEST(EdgeMetrics, SquareCenterOfGravity) {
  const EdgeMetrics m = edge_metrics(square_scene());
  ASSERT_GT(m.edge_length, 0u);
  EXPECT_NEAR(m.center_of_gravity->x, 47.5, 1.0);
  EXPECT_NEAR(m.center_of_gravity->y, 37.5, 1.0);
  EXPECT_EQ(m.components, 1u);
  EXPECT_GE(*m.intensity, 40.0);
  EXPECT_LE(*m.intensity, 255.0);
}

TEST(EdgeMetrics, FullRegionEqualsNoRegion) {
  const RasterImage img = square_scene();
  const EdgeMetrics a = edge_metrics(img);
  const EdgeMetrics b = edge_metrics(img, BinaryMask(96, 80, true));
  EXPECT_EQ(a.edge_length, b.edge_length);
  EXPECT_EQ(a.orientation_deg, b.orientation_deg);
  EXPECT_EQ(a.intensity, b.intensity);
  EXPECT_EQ(a.center_of_gravity, b.center_of_gravity);
}

TEST(EdgeMetrics, RegionRestrictsEdges) {
  const RasterImage img = square_scene();
  const EdgeMetrics all = edge_metrics(img);
  const EdgeMetrics left = edge_metrics(img, testing::rect_mask(96, 80, 0, 0, 48, 80));
  EXPECT_LT(left.edge_length, all.edge_length);
  EXPECT_LT(left.center_of_gravity->x, 48.0);
  EXPECT_THROW(edge_metrics(img, BinaryMask(10, 10, true)), Error);
}

TEST(EdgeMetrics, OrientationIsMeanOfGradientAngles) {
  // Vertical step, dark on the left: every edge gradient points along +x.
  RasterImage img(40, 40, 1, 30);
  for (int y = 0; y < 40; ++y) {
    for (int x = 20; x < 40; ++x) img.at(x, y) = 220;
  }
  const EdgeMetrics arith = edge_metrics(img);
  const EdgeMetrics circ = edge_metrics(img, std::nullopt, {}, OrientationMean::Circular);
  ASSERT_GT(arith.edge_length, 0u);
  EXPECT_NEAR(*arith.orientation_deg, 0.0, 1e-9);
  EXPECT_NEAR(*circ.orientation_deg, 0.0, 1e-9);
}

EdgeMetrics row(double len, double orient, double inten, double x, double y) {
  return EdgeMetrics::from_values(len, orient, inten, {x, y});
}

TEST(MetricsDelta, StopMapleRow) {
  const EdgeMetrics base = row(4468, 2.86, 142.51, 133.55, 149.78);
  const EdgeMetrics adv = row(6474, 2.69, 133.17, 129.65, 147.50);
  const MetricsDelta d = metrics_delta(base, adv);
  EXPECT_NEAR(d.edge_length_diff, 2006.0, 1e-9);
  EXPECT_NEAR(d.edge_length_percent, 2006.0 / 4468.0 * 100.0, 1e-9);
  EXPECT_NEAR(d.orientation_diff, 0.17, 1e-9);
  EXPECT_NEAR(d.orientation_percent, 0.17 / 3.6, 1e-9);
  EXPECT_NEAR(d.intensity_diff, 9.34, 1e-9);
  EXPECT_NEAR(d.intensity_percent, 9.34 / 142.51 * 100.0, 1e-9);
  EXPECT_NEAR(d.cog_distance, std::hypot(3.90, 2.28), 1e-9);
}

TEST(MetricsDelta, SelfIsZeroAndDiffsAreSymmetric) {
  const EdgeMetrics a = row(100, 3.0, 120.0, 10, 20);
  const EdgeMetrics b = row(150, -2.0, 90.0, 13, 24);
  const MetricsDelta zero = metrics_delta(a, a);
  EXPECT_EQ(zero.edge_length_diff, 0.0);
  EXPECT_EQ(zero.cog_distance, 0.0);
  const MetricsDelta ab = metrics_delta(a, b), ba = metrics_delta(b, a);
  EXPECT_DOUBLE_EQ(ab.edge_length_diff, ba.edge_length_diff);
  EXPECT_DOUBLE_EQ(ab.orientation_diff, ba.orientation_diff);
  EXPECT_DOUBLE_EQ(ab.cog_distance, ba.cog_distance);
  // Percentages are relative to the base, so they are not symmetric.
  EXPECT_NE(ab.edge_length_percent, ba.edge_length_percent);
}

TEST(MetricsDelta, TriangleInequalityOnRandomRows) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(1.0, 300.0);
  for (int i = 0; i < 200; ++i) {
    const EdgeMetrics a = row(u(rng), u(rng) - 150, u(rng), u(rng), u(rng));
    const EdgeMetrics b = row(u(rng), u(rng) - 150, u(rng), u(rng), u(rng));
    const EdgeMetrics c = row(u(rng), u(rng) - 150, u(rng), u(rng), u(rng));
    const MetricsDelta ab = metrics_delta(a, b), bc = metrics_delta(b, c), ac = metrics_delta(a, c);
    EXPECT_LE(ac.edge_length_diff, ab.edge_length_diff + bc.edge_length_diff + 1e-9);
    EXPECT_LE(ac.orientation_diff, ab.orientation_diff + bc.orientation_diff + 1e-9);
    EXPECT_LE(ac.intensity_diff, ab.intensity_diff + bc.intensity_diff + 1e-9);
    EXPECT_LE(ac.cog_distance, ab.cog_distance + bc.cog_distance + 1e-9);
  }
}

TEST(MetricsDelta, UndefinedWithoutBaseEdges) {
  try {
    metrics_delta(EdgeMetrics{}, row(1, 0, 1, 0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UndefinedPercent);
  }
  EXPECT_THROW(metrics_delta(row(10, 0, 0.0, 0, 0), row(1, 0, 1, 0, 0)), Error);
}

TEST(CohortAverages, SplitsBySuccess) {
  const EdgeMetrics base = row(100, 0, 100, 0, 0);
  std::vector<CohortRow> rows;
  for (const auto& [len, ok] : {std::pair{110.0, true}, {130.0, true}, {90.0, false}}) {
    const EdgeMetrics m = row(len, 1.0, 100.0, len, 0);
    rows.push_back({m, metrics_delta(base, m), ok});
  }
  const CohortSplit s = cohort_averages(rows);
  ASSERT_TRUE(s.successful && s.unsuccessful);
  EXPECT_EQ(s.successful->count, 2u);
  EXPECT_DOUBLE_EQ(s.successful->edge_length, 120.0);
  EXPECT_DOUBLE_EQ(s.successful->delta.edge_length_diff, 20.0);
  EXPECT_DOUBLE_EQ(s.successful->center_of_gravity.x, 120.0);
  EXPECT_DOUBLE_EQ(s.unsuccessful->edge_length, 90.0);
}

TEST(CohortAverages, SingleRowAndEmptyCohort) {
  const EdgeMetrics m = row(50, 2, 60, 1, 2);
  const CohortSplit s = cohort_averages({{m, metrics_delta(m, m), false}});
  EXPECT_FALSE(s.successful);
  ASSERT_TRUE(s.unsuccessful);
  EXPECT_DOUBLE_EQ(s.unsuccessful->intensity, 60.0);
  EXPECT_FALSE(cohort_averages({}).successful);
}

TEST(MetricsIo, ParsesFixtureCsv) {
  const auto base = load_metrics(kFixtures + "/table2_baselines.csv");
  ASSERT_EQ(base.size(), 5u);
  EXPECT_EQ(base[0].name, "Stop");
  EXPECT_EQ(base[0].metrics.edge_length, 4468u);
  EXPECT_DOUBLE_EQ(*base[3].metrics.orientation_deg, -0.73);
  EXPECT_DOUBLE_EQ(base[4].metrics.center_of_gravity->y, 96.53);

  const auto adv = load_metrics(kFixtures + "/table3_adversarial.csv");
  ASSERT_EQ(adv.size(), 15u);
  EXPECT_EQ(adv[1].success, false);
  EXPECT_EQ(adv[3].base, "Pedestrian");
}

TEST(MetricsIo, ComparisonReproducesExpectedTable) {
  const auto rows = compare_metrics(load_metrics(kFixtures + "/table2_baselines.csv"),
                                    load_metrics(kFixtures + "/table3_adversarial.csv"));
  ASSERT_EQ(rows.size(), 15u);
  const std::string produced = table3_csv(rows);
  const std::string expected = read_file(kFixtures + "/table3_expected.csv");
  std::vector<std::string> got_lines, want_lines;
  for (const auto* text : {&produced, &expected}) {
    auto& out = text == &produced ? got_lines : want_lines;
    std::size_t start = 0;
    while (start < text->size()) {
      const std::size_t end = text->find('\n', start);
      out.push_back(text->substr(start, end - start));
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  ASSERT_EQ(got_lines.size(), want_lines.size());
  EXPECT_EQ(got_lines[0], want_lines[0]);
  for (std::size_t i = 1; i < got_lines.size(); ++i) {
    const auto got = split_csv_line(got_lines[i]);
    const auto want = split_csv_line(want_lines[i]);
    ASSERT_EQ(got.size(), want.size()) << got_lines[i];
    EXPECT_EQ(got[0], want[0]);
    for (std::size_t c = 1; c < got.size(); ++c) {
      if (c == 4) continue;  // point column
      EXPECT_NEAR(std::stod(got[c]), std::stod(want[c]), 0.0101) << want[0] << " column " << c;
    }
  }
}

TEST(MetricsIo, JsonAndCsvRoundTrip) {
  NamedMetrics nm{"Stop", row(4468, 2.86, 142.51, 133.55, 149.78), std::nullopt, std::nullopt};
  const auto from_json = parse_metrics(edge_metrics_json(nm, {}));
  ASSERT_EQ(from_json.size(), 1u);
  EXPECT_EQ(from_json[0].name, "Stop");
  EXPECT_EQ(from_json[0].metrics.edge_length, 4468u);
  EXPECT_DOUBLE_EQ(*from_json[0].metrics.intensity, 142.51);

  const auto from_csv = parse_metrics(table2_csv_header() + table2_csv_line(nm));
  ASSERT_EQ(from_csv.size(), 1u);
  EXPECT_NEAR(from_csv[0].metrics.center_of_gravity->x, 133.55, 1e-9);
}

TEST(MetricsIo, CompareNeedsAMatchingBaseline) {
  const std::vector<NamedMetrics> base{{"Stop", row(10, 0, 10, 0, 0), {}, {}}, {"Yield", row(10, 0, 10, 0, 0), {}, {}}};
  const std::vector<NamedMetrics> adv{{"Merge Oak", row(10, 0, 10, 0, 0), true, {}}};
  EXPECT_THROW(compare_metrics(base, adv), Error);
  const std::vector<NamedMetrics> adv2{{"Stop Oak", row(12, 0, 10, 0, 0), true, {}}};
  EXPECT_DOUBLE_EQ(compare_metrics(base, adv2).at(0).delta.edge_length_diff, 2.0);
}

TEST(SplitCsvLine, QuotedFields) {
  const auto f = split_csv_line(R"csv(a,"(1.00, 2.00)","say ""hi""",)csv");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[1], "(1.00, 2.00)");
  EXPECT_EQ(f[2], "say \"hi\"");
  EXPECT_EQ(f[3], "");
}

}  // namespace
}  // namespace leafattack
