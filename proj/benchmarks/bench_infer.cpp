#include <benchmark/benchmark.h>

#include <vector>

#include "biobench/infer.hpp"
#include "biobench/rng.hpp"

namespace {

using namespace biobench;

std::vector<double> noise(std::size_t n, std::uint64_t seed, double lo = -1,
                          double hi = 1) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

void BM_SvmDecisionRbf(benchmark::State& state) {
  const auto n_sv = static_cast<std::size_t>(state.range(0));
  infer::SvmModel m;
  m.kernel = infer::SvmKernel::rbf;
  m.dim = 18;
  m.gamma = 0.05;
  m.support_vectors = noise(n_sv * m.dim, 1);
  m.dual_coeffs = noise(n_sv, 2);
  const auto x = noise(m.dim, 3);
  KernelContext ctx;
  for (auto _ : state) {
    const double d = infer::svm_decision(m, x, ctx);
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(n_sv * m.dim));
}
BENCHMARK(BM_SvmDecisionRbf)->Arg(64)->Arg(256);

void BM_KnnClassify(benchmark::State& state) {
  const std::size_t n = 685;
  infer::KnnTrainingSet set;
  set.dim = 3;
  set.points = noise(n * set.dim, 4, 0, 2e6);
  Rng lr(5);
  for (std::size_t i = 0; i < n; ++i)
    set.labels.push_back(static_cast<int>(lr.below(2)));
  const auto q = noise(set.dim, 6, 0, 2e6);
  KernelContext ctx;
  for (auto _ : state) {
    const int label = infer::knn_classify(set, q, 26, ctx);
    benchmark::DoNotOptimize(label);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_KnnClassify);

void BM_ForestPredict(benchmark::State& state) {
  Rng rng(7);
  infer::ForestModel m;
  m.n_features = 14;
  for (int t = 0; t < 33; ++t) {
    // Full binary tree of depth 6 laid out by recursive construction.
    std::vector<infer::TreeNode> tree;
    const auto grow = [&](auto&& self, int depth) -> int {
      const int id = static_cast<int>(tree.size());
      tree.push_back({});
      if (depth >= 6) {
        tree[id].feature = -1;
        tree[id].value = rng.uniform(0, 1);
        return id;
      }
      tree[id].feature = static_cast<int>(rng.below(m.n_features));
      tree[id].threshold = rng.uniform(-1, 1);
      tree[id].left = self(self, depth + 1);
      tree[id].right = self(self, depth + 1);
      return id;
    };
    grow(grow, 0);
    m.trees.push_back(std::move(tree));
  }
  const auto x = noise(m.n_features, 8);
  KernelContext ctx;
  for (auto _ : state) {
    const double p = infer::forest_predict(m, x, ctx);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_ForestPredict);

void BM_ConvBlockForward(benchmark::State& state) {
  infer::ConvBlock b;
  b.in_ch = 23;
  b.out_ch = 16;
  b.kernel = 5;
  b.pool = 4;
  b.weights = noise(b.out_ch * b.in_ch * b.kernel, 9, -0.2, 0.2);
  for (std::size_t c = 0; c < b.out_ch; ++c) {
    b.bn_gamma.push_back(1.0);
    b.bn_beta.push_back(0.0);
    b.bn_mean.push_back(0.0);
    b.bn_var.push_back(1.0);
  }
  infer::Tensor1d x{23, 1024, noise(23 * 1024, 10)};
  KernelContext ctx;
  for (auto _ : state) {
    auto y = infer::conv_block_forward(b, x, ctx);
    benchmark::DoNotOptimize(y.data.data());
  }
}
BENCHMARK(BM_ConvBlockForward);

void BM_Fastica(benchmark::State& state) {
  const std::size_t n = 2000;
  Rng rng(11);
  std::vector<double> x(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 1000.0;
    const double s1 = std::sin(2.0 * M_PI * 5.0 * t);
    const double s2 = std::sin(2.0 * M_PI * 3.0 * t) >= 0 ? 0.8 : -0.8;
    for (std::size_t c = 0; c < 4; ++c)
      x[c * n + i] = (0.3 + 0.2 * static_cast<double>(c)) * s1 +
                     (0.9 - 0.2 * static_cast<double>(c)) * s2 +
                     1e-4 * rng.uniform(-1, 1);
  }
  infer::IcaParams p;
  p.n_components = 2;
  p.seed = 3;
  KernelContext ctx;
  for (auto _ : state) {
    auto r = infer::fastica(x, 4, n, p, ctx);
    benchmark::DoNotOptimize(r.sources.data());
  }
}
BENCHMARK(BM_Fastica);

}  // namespace
