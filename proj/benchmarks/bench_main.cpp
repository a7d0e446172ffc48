#include <benchmark/benchmark.h>

#include "attack_fixtures.hpp"
#include "leafattack/attack.hpp"
#include "leafattack/classifier.hpp"
#include "leafattack/edgeops.hpp"
#include "leafattack/maskgen.hpp"
#include "synthetic.hpp"

namespace {

using namespace leafattack;

RasterImage gray_scene(int n) {
  return to_grayscale(testing::render_dark_on_white(testing::ellipse_mask(n, n, n / 2.0, n / 2.0, n / 3.0, n / 5.0)));
}

void BM_GaussianBlur(benchmark::State& state) {
  const RasterImage img = gray_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur(img, 1.4));
  state.SetItemsProcessed(state.iterations() * img.pixel_count());
}
BENCHMARK(BM_GaussianBlur)->Arg(128)->Arg(512);

void BM_Canny(benchmark::State& state) {
  const RasterImage img = gray_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(canny(img, {}));
  state.SetItemsProcessed(state.iterations() * img.pixel_count());
}
BENCHMARK(BM_Canny)->Arg(128)->Arg(512);

void BM_GenerateLeafMask(benchmark::State& state) {
  const RasterImage img = testing::render_dark_on_white(testing::leaf_lobed_truth());
  for (auto _ : state) benchmark::DoNotOptimize(generate_leaf_mask(img));
}
BENCHMARK(BM_GenerateLeafMask);

void BM_LisaForward(benchmark::State& state) {
  const ClassifierSpec spec = lisa_cnn_architecture(1);
  const RasterImage img = testing::random_rgb(64, 64, 2);
  for (auto _ : state) benchmark::DoNotOptimize(forward(spec, img));
}
BENCHMARK(BM_LisaForward)->Unit(benchmark::kMillisecond);

void BM_EnumerateCandidates(benchmark::State& state) {
  const SignInstance sign = testing::gradient_sign();
  const LeafAsset leaf = testing::dark_leaf();
  AttackConfig cfg;
  cfg.grid_stride = static_cast<int>(state.range(0));
  std::size_t n = 0;
  for (auto _ : state) {
    const auto c = enumerate_candidates(cfg, sign, leaf);
    n = c.size();
    benchmark::DoNotOptimize(c.data());
  }
  state.counters["candidates"] = static_cast<double>(n);
}
BENCHMARK(BM_EnumerateCandidates)->Arg(1)->Arg(4);

void BM_RunAttackStub(benchmark::State& state) {
  const SignInstance sign = testing::gradient_sign();
  const LeafAsset leaf = testing::dark_leaf();
  const StubClassifier stub = testing::brightness_stub(140.0);
  AttackConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_attack(cfg, sign, leaf, stub));
}
BENCHMARK(BM_RunAttackStub)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
