#include <benchmark/benchmark.h>

#include <random>

#include "xferscope/eval.hpp"
#include "xferscope/kernel_solvers.hpp"
#include "xferscope/linmodel.hpp"
#include "xferscope/protocols.hpp"
#include "xferscope/stats.hpp"
#include "xferscope/synth.hpp"

namespace xs = xferscope;

namespace {

xs::Matrix gaussian(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  xs::Matrix m(n, k);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

xs::Labels alternating(std::size_t n) {
  xs::Labels y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 ? 1 : -1;
  return y;
}

xs::Matrix with_signal(std::size_t n, std::size_t k) {
  xs::Matrix x = gaussian(n, k, 3);
  const auto y = alternating(n);
  for (std::size_t i = 0; i < n; ++i) x.row(i).head(k / 20).array() += 0.5 * y[i];
  return x;
}

void BM_AnovaF(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const xs::Matrix x = gaussian(80, k, 1);
  const auto y = alternating(80);
  for (auto _ : state) benchmark::DoNotOptimize(xs::anova_f(x, y));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(k));
}
BENCHMARK(BM_AnovaF)->Arg(1000)->Arg(10000);

void BM_FitSvc(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const xs::Matrix x = with_signal(66, k);
  const auto y = alternating(66);
  for (auto _ : state) benchmark::DoNotOptimize(xs::fit_linear_svc(x, y, 1.0));
}
BENCHMARK(BM_FitSvc)->Arg(150)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_FitLogreg(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const xs::Matrix x = with_signal(66, k);
  const auto y = alternating(66);
  for (auto _ : state) benchmark::DoNotOptimize(xs::fit_logreg_l2(x, y, 1.0));
}
BENCHMARK(BM_FitLogreg)->Arg(150)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SelectCGram(benchmark::State& state) {
  const xs::Matrix x = with_signal(66, 2000);
  const xs::Matrix gram = x * x.transpose();
  const auto y = alternating(66);
  const auto grid = xs::default_C_grid();
  const auto kind = state.range(0) ? xs::ClassifierKind::LogisticL2 : xs::ClassifierKind::LinearSVC;
  for (auto _ : state) benchmark::DoNotOptimize(xs::select_C_gram(gram, y, kind, grid, 6, 1));
}
BENCHMARK(BM_SelectCGram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_InlineCurve(benchmark::State& state) {
  xs::SyntheticSpec spec;
  spec.geometry = xs::GridGeometry(12, 12, 10);
  spec.seed = 5;
  xs::BlobSpec blob;
  blob.center = {4, 4, 4};
  blob.amplitude = 0.3;
  spec.shared_blobs = {blob};
  const auto pair = xs::generate_pair(spec).pair;
  xs::ProtocolConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(xs::inline_curve(pair.target, cfg));
}
BENCHMARK(BM_InlineCurve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
