#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "biobench/infer.hpp"
#include "biobench/infer_io.hpp"
#include "biobench/rng.hpp"

using namespace biobench;
using namespace biobench::infer;

namespace {

std::filesystem::path temp_file(const char* stem) {
  return std::filesystem::temp_directory_path() / stem;
}

Cnn1dModel small_random_cnn(std::uint64_t seed) {
  Rng rng(seed);
  Cnn1dModel m;
  m.in_ch = 2;
  m.in_len = 64;
  ConvBlock b;
  b.in_ch = 2;
  b.out_ch = 3;
  b.kernel = 5;
  b.pool = 2;
  b.weights.resize(b.out_ch * b.in_ch * b.kernel);
  for (auto& w : b.weights) w = rng.uniform(-0.5, 0.5);
  b.bn_gamma.assign(3, 1.0);
  b.bn_beta.assign(3, 0.05);
  b.bn_mean.assign(3, 0.0);
  b.bn_var.assign(3, 1.0);
  for (auto& v : b.bn_gamma) v = rng.uniform(0.8, 1.2);
  for (auto& v : b.bn_mean) v = rng.uniform(-0.1, 0.1);
  m.blocks.push_back(b);

  DenseLayer l1;
  l1.in = 3 * 30;
  l1.out = 8;
  l1.activation = Activation::relu;
  l1.weights.resize(l1.in * l1.out);
  for (auto& w : l1.weights) w = rng.uniform(-0.2, 0.2);
  l1.biases.assign(8, 0.01);
  m.fc.push_back(l1);

  DenseLayer l2;
  l2.in = 8;
  l2.out = 2;
  l2.activation = Activation::none;
  l2.weights.resize(16);
  for (auto& w : l2.weights) w = rng.uniform(-0.5, 0.5);
  l2.biases.assign(2, 0.0);
  m.fc.push_back(l2);
  return m;
}

}  // namespace

TEST_SUITE("infer.classic") {

TEST_CASE("linear svm computes a dot-product margin") {
  SvmModel m;
  m.kernel = SvmKernel::linear;
  m.dim = 2;
  m.support_vectors = {1, 0, 0, 1};
  m.dual_coeffs = {1, -1};
  m.bias = 0.25;
  KernelContext ctx;
  const std::vector<double> x{0.5, 0.75};
  CHECK(svm_decision(m, x, ctx) == doctest::Approx(0.5 - 0.75 + 0.25));
  CHECK(svm_classify(m, x, ctx) == 1);
  CHECK(ctx.counters().fp_mac > 0);
}

TEST_CASE("rbf svm matches the closed-form kernel") {
  SvmModel m;
  m.kernel = SvmKernel::rbf;
  m.dim = 2;
  m.support_vectors = {0, 0};
  m.dual_coeffs = {1};
  m.bias = -0.5;
  m.gamma = 1.0;
  KernelContext ctx;
  const std::vector<double> near{0.1, 0.1};
  const std::vector<double> far{3.0, 0.0};
  CHECK(svm_decision(m, near, ctx) ==
        doctest::Approx(std::exp(-0.02) - 0.5));
  CHECK(svm_classify(m, near, ctx) == 1);
  CHECK(svm_classify(m, far, ctx) == 0);
}

TEST_CASE("svm validation") {
  SvmModel m;
  m.dim = 3;
  m.support_vectors = {1, 2};  // not a multiple of dim
  m.dual_coeffs = {1};
  KernelContext ctx;
  CHECK_THROWS_AS(svm_decision(m, std::vector<double>{1, 2, 3}, ctx), DomainError);
}

TEST_CASE("forest averages its leaves") {
  ForestModel m;
  m.n_features = 1;
  m.trees.push_back({{0, 0.5, 1, 2, 0}, {-1, 0, -1, -1, 0.0}, {-1, 0, -1, -1, 1.0}});
  m.trees.push_back({{-1, 0, -1, -1, 1.0}});
  KernelContext ctx;
  CHECK(forest_predict(m, std::vector<double>{0.3}, ctx) == doctest::Approx(0.5));
  CHECK(forest_predict(m, std::vector<double>{0.7}, ctx) == doctest::Approx(1.0));
  CHECK(forest_classify(m, std::vector<double>{0.3}, ctx) == 1);  // 0.5 rounds up
}

TEST_CASE("forest validation catches bad children") {
  ForestModel m;
  m.n_features = 1;
  m.trees.push_back({{0, 0.5, 7, 2, 0}});
  KernelContext ctx;
  CHECK_THROWS_AS(forest_predict(m, std::vector<double>{0.3}, ctx), DomainError);
}

TEST_CASE("partial selection matches std::partial_sort") {
  Rng rng(404);
  std::vector<double> v(120);
  for (auto& x : v) x = rng.uniform(-10, 10);
  KernelContext ctx;
  const auto idx = partial_select_k(v, 17, ctx);
  REQUIRE(idx.size() == 17);
  auto ref = v;
  std::partial_sort(ref.begin(), ref.begin() + 17, ref.end());
  for (std::size_t i = 0; i < 17; ++i) CHECK(v[idx[i]] == ref[i]);
  CHECK_THROWS_AS(partial_select_k(v, 0, ctx), DomainError);
  CHECK_THROWS_AS(partial_select_k(v, 121, ctx), DomainError);
}

TEST_CASE("knn majority vote with smaller-label ties") {
  KnnTrainingSet set;
  set.dim = 1;
  set.points = {0, 1, 2, 10, 11, 12};
  set.labels = {0, 0, 0, 1, 1, 1};
  KernelContext ctx;
  CHECK(knn_classify(set, std::vector<double>{1.5}, 3, ctx) == 0);
  CHECK(knn_classify(set, std::vector<double>{10.5}, 3, ctx) == 1);
  // 6 is equidistant from the 2 and 10 clusters: k=2 picks one of each
  CHECK(knn_classify(set, std::vector<double>{6.0}, 2, ctx) == 0);
}

TEST_CASE("fuzzy trapezoid membership") {
  const Trapezoid t{0, 1, 2, 4};
  CHECK(t.membership(-1) == 0.0);
  CHECK(t.membership(0.5) == doctest::Approx(0.5));
  CHECK(t.membership(1.5) == 1.0);
  CHECK(t.membership(3) == doctest::Approx(0.5));
  CHECK(t.membership(5) == 0.0);
  const Trapezoid step{0, 0, 1, 1};
  CHECK(step.membership(0) == 1.0);
  CHECK(step.membership(1) == 1.0);
  CHECK_THROWS_AS((Trapezoid{2, 1, 3, 4}.validate()), DomainError);
}

TEST_CASE("fuzzy max-min inference") {
  std::vector<FuzzyRule> rules(2);
  rules[0].terms = {{0, 1, 2, 3}, {0, 1, 2, 3}};
  rules[0].output_class = 0;
  rules[1].terms = {{2, 3, 4, 5}, {0, 1, 2, 3}};
  rules[1].output_class = 1;
  KernelContext ctx;
  const auto d0 = fuzzy_classify(rules, std::vector<double>{1.5, 1.5}, ctx);
  CHECK(d0.winner == 0);
  CHECK(d0.strength == doctest::Approx(1.0));
  const auto d1 = fuzzy_classify(rules, std::vector<double>{3.5, 1.0}, ctx);
  CHECK(d1.winner == 1);
  CHECK(d1.strength == doctest::Approx(1.0));
  // rule arity must match the feature vector
  CHECK_THROWS_AS(fuzzy_classify(rules, std::vector<double>{1.0}, ctx),
                  DomainError);
}

}  // TEST_SUITE

TEST_SUITE("infer.nets") {

TEST_CASE("dense layer with identity weights adds the bias") {
  DenseLayer l;
  l.in = 2;
  l.out = 2;
  l.weights = {1, 0, 0, 1};
  l.biases = {0.5, -2.0};
  l.activation = Activation::none;
  KernelContext ctx;
  const auto y = mlp_forward(std::vector<DenseLayer>{l}, std::vector<double>{1, 2}, ctx);
  CHECK(y[0] == doctest::Approx(1.5));
  CHECK(y[1] == doctest::Approx(0.0));
}

TEST_CASE("relu clips and softmax normalizes") {
  DenseLayer l;
  l.in = 2;
  l.out = 2;
  l.weights = {1, 0, 0, 1};
  l.biases = {0, 0};
  l.activation = Activation::relu;
  KernelContext ctx;
  auto y = mlp_forward(std::vector<DenseLayer>{l}, std::vector<double>{-3, 2}, ctx);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 2.0);

  l.activation = Activation::softmax;
  y = mlp_forward(std::vector<DenseLayer>{l}, std::vector<double>{1, 3}, ctx);
  CHECK(y[0] + y[1] == doctest::Approx(1.0));
  CHECK(y[1] > y[0]);
  CHECK(y[1] == doctest::Approx(std::exp(3.0) / (std::exp(1.0) + std::exp(3.0))));
}

TEST_CASE("layer chaining is checked") {
  DenseLayer a;
  a.in = 2;
  a.out = 3;
  a.weights.assign(6, 0.1);
  a.biases.assign(3, 0.0);
  DenseLayer b;
  b.in = 4;  // wrong
  b.out = 1;
  b.weights.assign(4, 0.1);
  b.biases.assign(1, 0.0);
  KernelContext ctx;
  CHECK_THROWS_AS(
      mlp_forward(std::vector<DenseLayer>{a, b}, std::vector<double>{1, 2}, ctx),
      DomainError);
}

TEST_CASE("conv block against a hand-computed example") {
  ConvBlock b;
  b.in_ch = 1;
  b.out_ch = 1;
  b.kernel = 2;
  b.pool = 3;
  b.weights = {-1, 1};  // first difference
  b.bn_gamma = {1};
  b.bn_beta = {0};
  b.bn_mean = {0};
  b.bn_var = {1.0 - 1e-5};  // so gamma / sqrt(var + eps) == 1 exactly
  Tensor1d x{1, 4, {1, 2, 4, 7}};
  KernelContext ctx;
  const auto y = conv_block_forward(b, x, ctx);
  REQUIRE(y.channels == 1);
  REQUIRE(y.len == 1);
  CHECK(y.at(0, 0) == doctest::Approx(3.0));  // max(relu({1,2,3}))
}

TEST_CASE("cnn shape bookkeeping") {
  const auto m = small_random_cnn(5);
  CHECK(m.flat_features() == 90);
  CHECK(m.parameter_count() == 3 * 2 * 5 + 2 * 3 + (90 * 8 + 8) + (8 * 2 + 2));
  Tensor1d x{2, 64, std::vector<double>(128, 0.1)};
  KernelContext ctx;
  const auto y = cnn_forward(m, x, ctx);
  CHECK(y.size() == 2);
}

TEST_CASE("quantized cnn tracks the floating-point network") {
  const auto m = small_random_cnn(17);
  const auto q = quantize_cnn(m);

  Rng rng(99);
  std::vector<std::int16_t> codes(2 * 64);
  for (auto& c : codes) c = static_cast<std::int16_t>(rng.below(20000)) ;
  for (auto& c : codes) c = static_cast<std::int16_t>(c - 10000);

  Tensor1d x{2, 64, {}};
  x.data.resize(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i)
    x.data[i] = codes[i] / 32768.0;

  KernelContext fp_ctx, q_ctx;
  const auto fp = cnn_forward(m, x, fp_ctx);
  const auto qi = qcnn_forward(q, codes, q_ctx);
  REQUIRE(qi.size() == fp.size());

  double max_abs = 1e-3;
  for (double v : fp) max_abs = std::max(max_abs, std::fabs(v));
  for (std::size_t i = 0; i < fp.size(); ++i)
    CHECK(qi[i] / 32768.0 == doctest::Approx(fp[i]).epsilon(0.05).scale(max_abs));

  // integer path must count as fixed point and be bit-stable
  CHECK(q_ctx.counters().fxp_mac > 0);
  CHECK(q_ctx.counters().fp_mac == 0);
  KernelContext ctx2;
  CHECK(qcnn_forward(q, codes, ctx2) == qi);
}

TEST_CASE("quantized model io round trip preserves outputs bit-exactly") {
  const auto q = quantize_cnn(small_random_cnn(23));
  const auto path = temp_file("biobench_qcnn.json");
  save_qcnn(q, path);
  const auto back = load_qcnn(path);
  std::vector<std::int16_t> codes(2 * 64);
  Rng rng(1);
  for (auto& c : codes)
    c = static_cast<std::int16_t>(static_cast<int>(rng.below(32768)) - 16384);
  KernelContext c1, c2;
  CHECK(qcnn_forward(q, codes, c1) == qcnn_forward(back, codes, c2));
  std::filesystem::remove(path);
}

}  // TEST_SUITE

TEST_SUITE("infer.ica") {

TEST_CASE("jacobi solves a known 2x2 system") {
  KernelContext ctx;
  const auto e = jacobi_eigen({2, 1, 1, 2}, 2, ctx);
  CHECK(e.values[0] == doctest::Approx(3.0));
  CHECK(e.values[1] == doctest::Approx(1.0));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::fabs(e.vectors[0]) == doctest::Approx(s));
  CHECK(std::fabs(e.vectors[2]) == doctest::Approx(s));
}

TEST_CASE("jacobi satisfies A v = lambda v on random symmetric matrices") {
  Rng rng(7);
  const std::size_t n = 6;
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = rng.uniform(-2, 2);
      a[i * n + j] = v;
      a[j * n + i] = v;
    }
  KernelContext ctx;
  const auto e = jacobi_eigen(a, n, ctx);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double av = 0;
      for (std::size_t k = 0; k < n; ++k) av += a[i * n + k] * e.vectors[k * n + j];
      CHECK(av == doctest::Approx(e.values[j] * e.vectors[i * n + j])
                      .epsilon(1e-8)
                      .scale(3.0));
    }
    // eigenvalues arrive sorted descending
    if (j > 0) CHECK(e.values[j] <= e.values[j - 1] + 1e-12);
  }
  // columns are orthonormal
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      double dot = 0;
      for (std::size_t k = 0; k < n; ++k)
        dot += e.vectors[k * n + p] * e.vectors[k * n + q];
      CHECK(dot == doctest::Approx(p == q ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("jacobi rejects asymmetric input") {
  KernelContext ctx;
  CHECK_THROWS_AS(jacobi_eigen({1, 2, 3, 4}, 2, ctx), DomainError);
}

TEST_CASE("fastica separates a sine from a square wave") {
  const std::size_t n = 2000;
  std::vector<double> s1(n), s2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 1000.0;
    s1[i] = std::sin(2.0 * M_PI * 5.0 * t);
    s2[i] = std::sin(2.0 * M_PI * 3.0 * t) >= 0 ? 0.8 : -0.8;
  }
  const double mix[4][2] = {{0.9, 0.3}, {0.2, 0.8}, {0.5, 0.5}, {0.7, 0.1}};
  std::vector<double> x(4 * n);
  Rng rng(5);
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < n; ++i)
      x[c * n + i] = mix[c][0] * s1[i] + mix[c][1] * s2[i] +
                     1e-4 * rng.uniform(-1, 1);

  IcaParams p;
  p.n_components = 2;
  p.seed = 3;
  KernelContext ctx;
  const auto r = fastica(x, 4, n, p, ctx);
  CHECK(r.converged);
  REQUIRE(r.sources.size() == 2 * n);

  auto corr = [&](std::span<const double> a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < n; ++i) {
      num += (a[i] - ma) * (b[i] - mb);
      da += (a[i] - ma) * (a[i] - ma);
      db += (b[i] - mb) * (b[i] - mb);
    }
    return std::fabs(num / std::sqrt(da * db));
  };
  const std::span<const double> out1{r.sources.data(), n};
  const std::span<const double> out2{r.sources.data() + n, n};
  const double c1 = std::max(corr(out1, s1), corr(out2, s1));
  const double c2 = std::max(corr(out1, s2), corr(out2, s2));
  CHECK(c1 > 0.95);
  CHECK(c2 > 0.95);
}

TEST_CASE("fastica rejects a singular covariance") {
  const std::size_t n = 100;
  std::vector<double> x(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::sin(0.1 * static_cast<double>(i));
    x[n + i] = 2.0 * x[i];  // linearly dependent
  }
  IcaParams p;
  p.n_components = 2;
  KernelContext ctx;
  CHECK_THROWS_AS(fastica(x, 2, n, p, ctx), NumericError);
}

}  // TEST_SUITE

TEST_SUITE("infer.io") {

TEST_CASE("svm io round trip") {
  SvmModel m;
  m.kernel = SvmKernel::rbf;
  m.dim = 3;
  m.support_vectors = {1, 2, 3, 4, 5, 6};
  m.dual_coeffs = {0.5, -0.5};
  m.bias = 0.1;
  m.gamma = 0.7;
  const auto path = temp_file("biobench_svm.json");
  save_svm(m, path);
  const auto back = load_svm(path);
  CHECK(back.kernel == m.kernel);
  CHECK(back.support_vectors == m.support_vectors);
  CHECK(back.dual_coeffs == m.dual_coeffs);
  CHECK(back.bias == m.bias);
  CHECK(back.gamma == m.gamma);
  // wrong type tag
  CHECK_THROWS_AS(load_forest(path), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("forest io round trip") {
  ForestModel m;
  m.n_features = 2;
  m.trees.push_back({{0, 0.5, 1, 2, 0}, {-1, 0, -1, -1, 0.25}, {1, -1.5, 3, 4, 0},
                     {-1, 0, -1, -1, 0.75}, {-1, 0, -1, -1, 1.0}});
  const auto path = temp_file("biobench_forest.json");
  save_forest(m, path);
  const auto back = load_forest(path);
  REQUIRE(back.trees.size() == 1);
  REQUIRE(back.trees[0].size() == 5);
  CHECK(back.trees[0][2].feature == 1);
  CHECK(back.trees[0][2].threshold == -1.5);
  std::filesystem::remove(path);
}

TEST_CASE("knn and mlp io round trips") {
  KnnTrainingSet set;
  set.dim = 2;
  set.points = {0, 0, 1, 1};
  set.labels = {0, 1};
  const auto kp = temp_file("biobench_knn.json");
  save_knn(set, kp);
  CHECK(load_knn(kp).points == set.points);
  std::filesystem::remove(kp);

  DenseLayer l;
  l.in = 2;
  l.out = 1;
  l.weights = {0.25, -0.75};
  l.biases = {0.5};
  l.activation = Activation::tanh_act;
  const auto mp = temp_file("biobench_mlp.json");
  save_mlp({l}, mp);
  const auto layers = load_mlp(mp);
  REQUIRE(layers.size() == 1);
  CHECK(layers[0].weights == l.weights);
  CHECK(layers[0].activation == Activation::tanh_act);
  std::filesystem::remove(mp);
}

TEST_CASE("cnn io round trip preserves the forward pass") {
  const auto m = small_random_cnn(31);
  const auto path = temp_file("biobench_cnn.json");
  save_cnn(m, path);
  const auto back = load_cnn(path);
  Tensor1d x{2, 64, std::vector<double>(128, 0.05)};
  KernelContext c1, c2;
  const auto y1 = cnn_forward(m, x, c1);
  const auto y2 = cnn_forward(back, x, c2);
  REQUIRE(y1.size() == y2.size());
  for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1[i] == y2[i]);
  std::filesystem::remove(path);
}

TEST_CASE("malformed files raise FormatError") {
  const auto path = temp_file("biobench_bad.json");
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(load_svm(path), FormatError);
  std::ofstream(path) << "{\"type\": \"svm\"}";
  CHECK_THROWS_AS(load_svm(path), FormatError);  // missing fields
  CHECK_THROWS_AS(load_svm(temp_file("biobench_missing_zz.json")), FormatError);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
