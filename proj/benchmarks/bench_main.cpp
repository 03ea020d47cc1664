#include <vector>

#include <benchmark/benchmark.h>

#include "skintone/color.hpp"
#include "skintone/kpca.hpp"
#include "skintone/nmf.hpp"
#include "skintone/random.hpp"
#include "skintone/roi.hpp"
#include "skintone/sreds.hpp"
#include "skintone/synth.hpp"

using namespace skintone;

namespace {

SyntheticPatch patch(Eigen::Index n) {
  Rng rng(1);
  SynthConfig cfg;
  cfg.noise_sigma = 0.01;
  return generate_patch(random_scene(rng, cfg), n);
}

void BM_Factorize(benchmark::State& state) {
  const PatchMatrix V(patch(state.range(0)).pixels);
  for (auto _ : state) benchmark::DoNotOptimize(factorize(V));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Factorize)->Arg(256)->Arg(1024)->Arg(4096);

void BM_KpcaFit(benchmark::State& state) {
  Rng rng(2);
  std::vector<Eigen::Vector3d> bases;
  for (int i = 0; i < state.range(0); ++i) bases.push_back(skin_body_color(rng.uniform()));
  for (auto _ : state) benchmark::DoNotOptimize(fit_kpca(bases, 1));
}
BENCHMARK(BM_KpcaFit)->Arg(100)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_KpcaProject(benchmark::State& state) {
  Rng rng(3);
  std::vector<Eigen::Vector3d> bases;
  for (int i = 0; i < 2000; ++i) bases.push_back(skin_body_color(rng.uniform()));
  const KpcaFit fit = fit_kpca(bases, 1);
  const Eigen::Vector3d x = skin_body_color(0.4);
  for (auto _ : state) benchmark::DoNotOptimize(project_kpca(fit, x));
}
BENCHMARK(BM_KpcaProject);

void BM_DecomposeFace(benchmark::State& state) {
  const RenderedFace face = render_face(FaceScene{0.5, Eigen::Vector3d::Ones().normalized(), 15, 4});
  const FaceSample s = extract_crops(face.image, face.landmarks);
  for (auto _ : state) benchmark::DoNotOptimize(diffuse_bases(s));
}
BENCHMARK(BM_DecomposeFace)->Unit(benchmark::kMillisecond);

void BM_RgbToLab(benchmark::State& state) {
  Rng rng(5);
  std::vector<Rgb> px;
  for (int i = 0; i < 4096; ++i) px.push_back(Rgb{rng.uniform(), rng.uniform(), rng.uniform()});
  for (auto _ : state) {
    for (const auto& p : px) benchmark::DoNotOptimize(rgb_to_lab(p));
  }
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_RgbToLab);

}  // namespace

BENCHMARK_MAIN();
