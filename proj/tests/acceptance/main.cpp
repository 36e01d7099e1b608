// Acceptance gate: exercises the end-to-end contract and prints exactly one
// [PASS]/[FAIL] line per criterion.  Exits nonzero if any criterion fails.
//
// Usage: acceptance_gate <cli-binary> <data-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "biobench/apps.hpp"
#include "biobench/dsp.hpp"
#include "biobench/errors.hpp"
#include "biobench/infer.hpp"
#include "biobench/phasesim.hpp"
#include "biobench/power.hpp"
#include "biobench/report.hpp"
#include "biobench/rng.hpp"
#include "biobench/sigio.hpp"
#include "biobench/train.hpp"
#include "support/oracles.hpp"

using namespace biobench;
namespace fs = std::filesystem;

namespace {

fs::path g_cli;
fs::path g_data;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw Failure(msg);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

// ------------------------------------------------------------ criterion 1 --

std::string check_bandwidths() {
  const std::map<AppId, double> expected = {
      {AppId::HCL, 1536},        {AppId::SeizDetSVM, 128},
      {AppId::SeizDetCNN, 11776}, {AppId::CWM, 4096},
      {AppId::GCL, 192000},      {AppId::ECL, 822}};
  for (const auto& [app, bw] : expected) {
    const double got =
        sigio::input_bandwidth(apps::default_config(app).specs);
    require(got == bw, std::string(to_string(app)) + ": bandwidth " +
                           fmt(got) + " != " + fmt(bw));
  }
  const double cough =
      sigio::input_bandwidth(apps::default_config(AppId::CoughDet).specs);
  require(cough == 65200, "coughdet: computed bandwidth " + fmt(cough));
  require(std::abs(cough - 64400.0) / 64400.0 < 0.02,
          "coughdet: discrepancy above 2%");
  const auto metrics = report::characterize_app(
      apps::default_config(AppId::CoughDet), 1, {9.1, 80e6});
  bool flagged = false;
  for (const auto& n : metrics.notes)
    flagged |= n.find("64400") != std::string::npos;
  require(flagged, "coughdet: bandwidth discrepancy not flagged");
  return "six exact, coughdet 65200 vs 64400 flagged";
}

// ------------------------------------------------------------ criterion 2 --

std::string check_energy_table() {
  const auto records =
      power::load_energy_table(g_data / "platform_energy.csv");
  require(records.size() >= 38,
          "table has " + std::to_string(records.size()) + " records");
  for (const auto& r : records) {
    const double sum =
        r.idle_mj.value_or(0) + r.acq_mj.value_or(0) + r.proc_mj;
    require(std::abs(sum - r.total_mj) <= 0.001 + 1e-12,
            std::string(to_string(r.app)) + "/" + power::to_string(r.platform) +
                ": phases do not re-sum");
  }
  const auto svm = power::compare_platforms(records, AppId::SeizDetSVM);
  require(svm.ranking.front().first == power::Platform::apollo3blue,
          "seizdetsvm winner is not apollo3blue");
  require(std::abs(svm.ranking.front().second - 0.473) < 1e-9,
          "seizdetsvm winning energy " + fmt(svm.ranking.front().second));
  const auto cnn = power::compare_platforms(records, AppId::SeizDetCNN);
  require(cnn.ranking.front().first == power::Platform::gap9,
          "seizdetcnn winner is not gap9");
  require(std::abs(cnn.ranking.front().second - 7.452) < 1e-9,
          "seizdetcnn winning energy " + fmt(cnn.ranking.front().second));
  const double ratio =
      power::energy_ratio(records, AppId::SeizDetSVM,
                          power::Platform::stm32l4r5zi, power::Platform::gap9);
  require(std::abs(ratio - 22.1) <= 0.1,
          "seizdetsvm stm32->gap9 ratio " + fmt(ratio));
  return std::to_string(records.size()) + " records re-sum; winners and " +
         "22.1x ratio hold";
}

// ------------------------------------------------------------ criterion 3 --

std::string check_duty_bins() {
  const auto records =
      power::load_energy_table(g_data / "platform_energy.csv");
  const std::map<AppId, phasesim::DutyBin> expected = {
      {AppId::SeizDetSVM, phasesim::DutyBin::very_low},
      {AppId::HCL, phasesim::DutyBin::low},
      {AppId::CWM, phasesim::DutyBin::medium},
      {AppId::SeizDetCNN, phasesim::DutyBin::high}};
  std::vector<std::string> mismatches;
  for (const auto& [app, bin] : expected) {
    const auto m = report::characterize_app(
        apps::default_config(app), 1,
        {power::min_mcycles(records, app), 80e6});
    if (!m.duty_bin || *m.duty_bin != bin)
      mismatches.push_back(
          std::string(to_string(app)) + " expected " +
          phasesim::to_string(bin) + ", got " +
          (m.duty_bin ? phasesim::to_string(*m.duty_bin) : "none"));
  }
  std::string joined;
  for (const auto& m : mismatches) joined += (joined.empty() ? "" : "; ") + m;
  require(mismatches.empty(), joined);
  return "very_low/low/medium/high reproduced at 80 MHz";
}

// ------------------------------------------------------------ criterion 4 --

std::string check_dsp_oracles() {
  // FFT, floating point vs quadratic DFT.
  for (std::size_t n : {64u, 256u, 1024u}) {
    Rng rng(n);
    std::vector<std::complex<double>> x(n), ref(n);
    for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    ref = x;
    KernelContext ctx;
    dsp::fft_radix2(x, ctx);
    const auto want = oracles::naive_dft(ref);
    double max_mag = 0, max_err = 0;
    for (std::size_t k = 0; k < n; ++k) {
      max_mag = std::max(max_mag, std::abs(want[k]));
      max_err = std::max(max_err, std::abs(x[k] - want[k]));
    }
    require(max_err / max_mag < 1e-6,
            "fp fft n=" + std::to_string(n) + " rel err " +
                fmt(max_err / max_mag));
  }

  // FFT, q15 vs the same oracle on the dequantized input.  Complex tones
  // put each component's full energy into one bin, so the spectral peak
  // that normalizes the error is as large as the signal allows.
  for (std::size_t n : {128u, 256u, 512u}) {
    std::vector<std::int16_t> re(n), im(n);
    std::vector<std::complex<double>> ref(n);
    Rng qr(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n);
      const std::complex<double> v =
          0.6 * std::polar(1.0, 2.0 * M_PI * 11.0 * t) +
          0.3 * std::polar(1.0, -2.0 * M_PI * 53.0 * t) +
          std::complex<double>(qr.uniform(-1e-3, 1e-3),
                               qr.uniform(-1e-3, 1e-3));
      re[i] = static_cast<std::int16_t>(std::llround(v.real() * 32767.0));
      im[i] = static_cast<std::int16_t>(std::llround(v.imag() * 32767.0));
      ref[i] = {re[i] / 32768.0, im[i] / 32768.0};
    }
    KernelContext ctx;
    const int stages = dsp::fft_radix2_q15(re, im, ctx);
    const auto got = dsp::q15_spectrum_to_complex(re, im, stages);
    const auto want = oracles::naive_dft(ref);
    double max_mag = 0, max_err = 0;
    for (std::size_t k = 0; k < n; ++k) {
      max_mag = std::max(max_mag, std::abs(want[k]));
      max_err = std::max(max_err, std::abs(got[k] - want[k]));
    }
    require(max_err / max_mag < std::pow(2.0, -12),
            "q15 fft n=" + std::to_string(n) + " rel err " +
                fmt(max_err / max_mag));
  }

  // Morphology, exact against brute force on 1000 random instances.
  Rng rng(42);
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = 1 + rng.below(150);
    const std::size_t kmax = std::min<std::size_t>(31, 2 * n - 1);
    const std::size_t k = 1 + 2 * rng.below((kmax + 1) / 2);
    std::vector<double> x(n), er(n), di(n);
    for (auto& v : x) v = rng.uniform(-100, 100);
    KernelContext ctx;
    dsp::erode(x, er, k, ctx);
    dsp::dilate(x, di, k, ctx);
    require(er == oracles::brute_erode(x, k),
            "erode mismatch at instance " + std::to_string(inst));
    require(di == oracles::brute_dilate(x, k),
            "dilate mismatch at instance " + std::to_string(inst));
  }

  // Lomb periodogram vs the dense least-squares formulation.
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Rng lr(seed);
    const std::size_t n = 120;
    std::vector<double> t(n), x(n);
    double tick = 0;
    for (std::size_t i = 0; i < n; ++i) {
      tick += 0.4 + lr.uniform(0.0, 0.6);
      t[i] = tick;
      x[i] = std::sin(2.0 * M_PI * 0.11 * tick) +
             0.4 * std::cos(2.0 * M_PI * 0.31 * tick) + lr.uniform(-0.2, 0.2);
    }
    std::vector<double> freqs;
    for (int j = 1; j <= 48; ++j) freqs.push_back(0.01 * j);
    KernelContext ctx;
    const auto got = dsp::lomb_scargle(t, x, freqs, ctx);
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      const double want = oracles::lomb_reference(t, x, freqs[j]);
      const double rel =
          std::abs(got[j] - want) / std::max(1.0, std::abs(want));
      require(rel < 1e-6, "lomb seed " + std::to_string(seed) + " f=" +
                              fmt(freqs[j]) + " rel err " + fmt(rel));
    }
  }

  // MFCC vs the straight-line cepstral reference.
  Rng mr(7);
  std::vector<double> audio(4 * 512);
  for (std::size_t i = 0; i < audio.size(); ++i)
    audio[i] = 0.4 * std::sin(2.0 * M_PI * 620.0 * static_cast<double>(i) /
                              16000.0) +
               mr.uniform(-0.3, 0.3);
  dsp::MfccParams mp;
  KernelContext mctx;
  const auto got = dsp::mfcc(audio, 16000.0, mp, mctx);
  const auto want = oracles::reference_mfcc(audio, 16000.0, 512, 20, 13);
  require(got.size() == want.size(), "mfcc frame count mismatch");
  for (std::size_t f = 0; f < got.size(); ++f)
    for (std::size_t j = 0; j < 13; ++j) {
      const double rel = std::abs(got[f][j] - want[f][j]) /
                         std::max(1.0, std::abs(want[f][j]));
      require(rel < 1e-4, "mfcc frame " + std::to_string(f) + " coeff " +
                              std::to_string(j) + " rel err " + fmt(rel));
    }
  return "fft fp/q15, morphology x1000, lomb, mfcc all inside tolerance";
}

// ------------------------------------------------------------ criterion 5 --

infer::ForestModel random_forest(Rng& rng, std::size_t features) {
  infer::ForestModel m;
  m.n_features = features;
  const int n_trees = 3 + static_cast<int>(rng.below(4));
  for (int t = 0; t < n_trees; ++t) {
    std::vector<infer::TreeNode> tree;
    std::function<int(int)> grow = [&](int depth) {
      const int id = static_cast<int>(tree.size());
      tree.push_back({});
      if (depth >= 5 || rng.uniform(0, 1) < 0.3) {
        tree[id].feature = -1;
        tree[id].value = rng.uniform(0, 1);
        return id;
      }
      tree[id].feature = static_cast<int>(rng.below(features));
      tree[id].threshold = rng.uniform(-1, 1);
      tree[id].left = grow(depth + 1);
      tree[id].right = grow(depth + 1);
      return id;
    };
    grow(0);
    m.trees.push_back(std::move(tree));
  }
  return m;
}

double oracle_tree(const std::vector<infer::TreeNode>& tree,
                   std::span<const double> x) {
  int id = 0;
  while (tree[static_cast<std::size_t>(id)].feature >= 0) {
    const auto& nd = tree[static_cast<std::size_t>(id)];
    id = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left
                                                                 : nd.right;
  }
  return tree[static_cast<std::size_t>(id)].value;
}

std::string check_inference_oracles() {
  // partial_select_k equals the full-sort prefix on 1000 instances.
  Rng rng(500);
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = 1 + rng.below(80);
    const std::size_t k = 1 + rng.below(n);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-50, 50);
    KernelContext ctx;
    const auto idx = infer::partial_select_k(v, k, ctx);
    auto ref = v;
    std::partial_sort(ref.begin(),
                      ref.begin() + static_cast<std::ptrdiff_t>(k), ref.end());
    for (std::size_t i = 0; i < k; ++i)
      require(v[idx[i]] == ref[i],
              "partial_select instance " + std::to_string(inst));
  }

  // KNN vote vs an exhaustive oracle on 1000 queries.
  infer::KnnTrainingSet set;
  set.dim = 3;
  Rng kr(77);
  for (int i = 0; i < 300; ++i) {
    for (int d = 0; d < 3; ++d) set.points.push_back(kr.uniform(-2, 2));
    set.labels.push_back(static_cast<int>(kr.below(3)));
  }
  for (int q = 0; q < 1000; ++q) {
    std::vector<double> x = {kr.uniform(-2, 2), kr.uniform(-2, 2),
                             kr.uniform(-2, 2)};
    const std::size_t k = 1 + kr.below(25);
    KernelContext ctx;
    const int got = infer::knn_classify(set, x, k, ctx);

    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < set.size(); ++i) {
      double d2 = 0;
      for (std::size_t d = 0; d < 3; ++d) {
        const double diff = set.points[i * 3 + d] - x[d];
        d2 += diff * diff;
      }
      dist.push_back({d2, i});
    }
    std::stable_sort(dist.begin(), dist.end());
    std::map<int, int> votes;
    for (std::size_t i = 0; i < k; ++i) votes[set.labels[dist[i].second]]++;
    int want = -1, best = -1;
    for (const auto& [label, count] : votes)
      if (count > best) {
        best = count;
        want = label;
      }
    require(got == want, "knn query " + std::to_string(q));
  }

  // Random forest vs a recursive oracle walk.
  Rng fr(9);
  for (int f = 0; f < 5; ++f) {
    const auto forest = random_forest(fr, 8);
    for (int q = 0; q < 200; ++q) {
      std::vector<double> x(8);
      for (auto& v : x) v = fr.uniform(-1.5, 1.5);
      KernelContext ctx;
      const double got = infer::forest_predict(forest, x, ctx);
      double sum = 0;
      for (const auto& tree : forest.trees) sum += oracle_tree(tree, x);
      const double want = sum / static_cast<double>(forest.trees.size());
      require(std::abs(got - want) <= 1e-9, "forest query mismatch");
    }
  }

  // SVM decision vs the closed-form sums.
  Rng sr(15);
  for (auto kernel : {infer::SvmKernel::linear, infer::SvmKernel::rbf}) {
    infer::SvmModel m;
    m.kernel = kernel;
    m.dim = 6;
    m.gamma = 0.3;
    m.bias = sr.uniform(-1, 1);
    for (int sv = 0; sv < 12; ++sv) {
      for (int d = 0; d < 6; ++d) m.support_vectors.push_back(sr.uniform(-1, 1));
      m.dual_coeffs.push_back(sr.uniform(-1, 1));
    }
    for (int q = 0; q < 300; ++q) {
      std::vector<double> x(6);
      for (auto& v : x) v = sr.uniform(-1, 1);
      KernelContext ctx;
      const double got = infer::svm_decision(m, x, ctx);
      double want = m.bias;
      for (std::size_t sv = 0; sv < 12; ++sv) {
        double acc = 0;
        for (std::size_t d = 0; d < 6; ++d) {
          const double a = m.support_vectors[sv * 6 + d];
          acc += kernel == infer::SvmKernel::linear
                     ? a * x[d]
                     : (a - x[d]) * (a - x[d]);
        }
        want += m.dual_coeffs[sv] *
                (kernel == infer::SvmKernel::linear ? acc
                                                    : std::exp(-m.gamma * acc));
      }
      require(std::abs(got - want) <=
                  1e-9 * std::max(1.0, std::abs(want)),
              "svm decision mismatch");
    }
  }

  // MLP vs naive loops.
  Rng mr(23);
  infer::DenseLayer l1{5, 7, {}, {}, infer::Activation::tanh_act};
  l1.weights.resize(35);
  l1.biases.resize(7);
  for (auto& w : l1.weights) w = mr.uniform(-1, 1);
  for (auto& b : l1.biases) b = mr.uniform(-1, 1);
  infer::DenseLayer l2{7, 3, {}, {}, infer::Activation::softmax};
  l2.weights.resize(21);
  l2.biases.resize(3);
  for (auto& w : l2.weights) w = mr.uniform(-1, 1);
  for (auto& b : l2.biases) b = mr.uniform(-1, 1);
  const std::vector<infer::DenseLayer> net{l1, l2};
  for (int q = 0; q < 300; ++q) {
    std::vector<double> x(5);
    for (auto& v : x) v = mr.uniform(-1, 1);
    KernelContext ctx;
    const auto got = infer::mlp_forward(net, x, ctx);
    std::vector<double> h(7);
    for (std::size_t o = 0; o < 7; ++o) {
      double acc = l1.biases[o];
      for (std::size_t i = 0; i < 5; ++i) acc += l1.weights[o * 5 + i] * x[i];
      h[o] = std::tanh(acc);
    }
    std::vector<double> z(3);
    double zmax = -1e300;
    for (std::size_t o = 0; o < 3; ++o) {
      double acc = l2.biases[o];
      for (std::size_t i = 0; i < 7; ++i) acc += l2.weights[o * 7 + i] * h[i];
      z[o] = acc;
      zmax = std::max(zmax, acc);
    }
    double denom = 0;
    for (double v : z) denom += std::exp(v - zmax);
    for (std::size_t o = 0; o < 3; ++o) {
      const double want = std::exp(z[o] - zmax) / denom;
      require(std::abs(got[o] - want) <= 1e-9, "mlp output mismatch");
    }
  }

  // Conv block vs a naive quadruple loop.
  Rng cr(31);
  infer::ConvBlock b;
  b.in_ch = 3;
  b.out_ch = 4;
  b.kernel = 5;
  b.pool = 2;
  b.weights.resize(60);
  for (auto& w : b.weights) w = cr.uniform(-1, 1);
  for (int c = 0; c < 4; ++c) {
    b.bn_gamma.push_back(cr.uniform(0.5, 1.5));
    b.bn_beta.push_back(cr.uniform(-0.3, 0.3));
    b.bn_mean.push_back(cr.uniform(-0.2, 0.2));
    b.bn_var.push_back(cr.uniform(0.5, 1.5));
  }
  for (int q = 0; q < 100; ++q) {
    infer::Tensor1d x{3, 20, {}};
    x.data.resize(60);
    for (auto& v : x.data) v = cr.uniform(-1, 1);
    KernelContext ctx;
    const auto got = infer::conv_block_forward(b, x, ctx);
    const std::size_t conv_len = 20 - 5 + 1;
    const std::size_t out_len = conv_len / 2;
    require(got.channels == 4 && got.len == out_len, "conv output shape");
    for (std::size_t oc = 0; oc < 4; ++oc) {
      std::vector<double> act(conv_len);
      for (std::size_t p = 0; p < conv_len; ++p) {
        double acc = 0;
        for (std::size_t ic = 0; ic < 3; ++ic)
          for (std::size_t k = 0; k < 5; ++k)
            acc += b.weights[(oc * 3 + ic) * 5 + k] *
                   x.data[ic * 20 + p + k];
        const double bn = b.bn_gamma[oc] * (acc - b.bn_mean[oc]) /
                              std::sqrt(b.bn_var[oc] + 1e-5) +
                          b.bn_beta[oc];
        act[p] = std::max(0.0, bn);
      }
      for (std::size_t p = 0; p < out_len; ++p) {
        const double want = std::max(act[2 * p], act[2 * p + 1]);
        const double have = got.data[oc * out_len + p];
        require(std::abs(have - want) <=
                    1e-6 * std::max(1.0, std::abs(want)),
                "conv value mismatch");
      }
    }
  }
  return "selection, knn, forest, svm, mlp, conv all match their oracles";
}

// ------------------------------------------------------------ criterion 6 --

infer::Cnn1dModel tiny_cnn(std::uint64_t seed) {
  Rng rng(seed);
  infer::Cnn1dModel m;
  m.in_ch = 1;
  m.in_len = 16;
  infer::ConvBlock b;
  b.in_ch = 1;
  b.out_ch = 2;
  b.kernel = 3;
  b.pool = 2;
  b.weights.resize(6);
  for (auto& w : b.weights) w = rng.uniform(-0.6, 0.6);
  b.bn_gamma = {1.1, 0.9};
  b.bn_beta = {0.05, -0.02};
  b.bn_mean = {0.1, -0.1};
  b.bn_var = {0.8, 1.3};
  m.blocks.push_back(b);
  infer::DenseLayer l1{14, 4, {}, {}, infer::Activation::relu};
  l1.weights.resize(56);
  for (auto& w : l1.weights) w = rng.uniform(-0.4, 0.4);
  l1.biases = {0.02, -0.01, 0.03, 0.0};
  m.fc.push_back(l1);
  infer::DenseLayer l2{4, 2, {}, {}, infer::Activation::none};
  l2.weights.resize(8);
  for (auto& w : l2.weights) w = rng.uniform(-0.7, 0.7);
  l2.biases = {0.0, 0.0};
  m.fc.push_back(l2);
  return m;
}

train::TrainingBatch tiny_batch(std::uint64_t seed) {
  Rng rng(seed);
  train::TrainingBatch batch;
  batch.labels = {0, 0, 1, 1};
  for (int s = 0; s < 4; ++s) {
    infer::Tensor1d t{1, 16, {}};
    t.data.resize(16);
    const double shift = s < 2 ? 0.4 : -0.4;
    for (auto& v : t.data) v = shift + rng.uniform(-0.8, 0.8);
    batch.inputs.push_back(std::move(t));
  }
  return batch;
}

std::uint64_t hash_doubles(std::uint64_t h, std::span<const double> v) {
  for (double d : v) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::vector<std::uint64_t> layer_hashes(const infer::Cnn1dModel& m) {
  std::vector<std::uint64_t> out;
  for (const auto& b : m.blocks) {
    std::uint64_t h = 14695981039346656037ull;
    h = hash_doubles(h, b.weights);
    h = hash_doubles(h, b.bn_gamma);
    h = hash_doubles(h, b.bn_beta);
    h = hash_doubles(h, b.bn_mean);
    h = hash_doubles(h, b.bn_var);
    out.push_back(h);
  }
  for (const auto& l : m.fc) {
    std::uint64_t h = 14695981039346656037ull;
    h = hash_doubles(h, l.weights);
    h = hash_doubles(h, l.biases);
    out.push_back(h);
  }
  return out;
}

std::string check_bpfree_gradients() {
  const auto m0 = tiny_cnn(3);
  const auto batch = tiny_batch(8);
  const double margin = 2.0;
  const double h = 1e-4;
  KernelContext ctx;

  // Analytic gradients vs central finite differences, every tensor.
  for (std::size_t layer = 0; layer < 3; ++layer) {
    const auto grads = train::bpfree_layer_grad(m0, batch, layer, margin, ctx);
    auto loss_with = [&](std::size_t idx, double delta, bool bias) {
      auto m = m0;
      if (layer < m.blocks.size()) {
        m.blocks[layer].weights[idx] += delta;
      } else {
        auto& fc = m.fc[layer - m.blocks.size()];
        (bias ? fc.biases[idx] : fc.weights[idx]) += delta;
      }
      KernelContext c;
      return train::bpfree_layer_loss(m, batch, layer, margin, c);
    };
    for (std::size_t i = 0; i < grads.weights.size(); ++i) {
      const double fd =
          (loss_with(i, h, false) - loss_with(i, -h, false)) / (2 * h);
      const double rel =
          std::abs(grads.weights[i] - fd) /
          std::max(1e-4, std::abs(grads.weights[i]) + std::abs(fd));
      require(rel < 1e-4, "layer " + std::to_string(layer) + " weight " +
                              std::to_string(i) + " rel err " + fmt(rel));
    }
    for (std::size_t i = 0; i < grads.biases.size(); ++i) {
      const double fd =
          (loss_with(i, h, true) - loss_with(i, -h, true)) / (2 * h);
      const double rel = std::abs(grads.biases[i] - fd) /
                         std::max(1e-4, std::abs(grads.biases[i]) + std::abs(fd));
      require(rel < 1e-4, "layer " + std::to_string(layer) + " bias " +
                              std::to_string(i) + " rel err " + fmt(rel));
    }
  }

  // Zero learning rate must not move a single byte.
  {
    auto m = tiny_cnn(3);
    train::BpfreeParams p;
    p.margin = margin;
    p.learning_rate = 0.0;
    p.epochs = 3;
    KernelContext c;
    train::bpfree_train(m, batch, p, c);
    require(layer_hashes(m) == layer_hashes(m0), "eta=0 changed parameters");
  }

  // Per-layer isolation: one library epoch must equal a manual sequential
  // walk where each layer takes exactly its own gradient step, byte for
  // byte per layer hash.
  {
    const double lr = 0.01;
    auto manual = tiny_cnn(3);
    for (std::size_t layer = 0; layer < 3; ++layer) {
      KernelContext c;
      const auto g = train::bpfree_layer_grad(manual, batch, layer, margin, c);
      if (layer < manual.blocks.size()) {
        for (std::size_t i = 0; i < g.weights.size(); ++i)
          manual.blocks[layer].weights[i] -= lr * g.weights[i];
      } else {
        auto& fc = manual.fc[layer - manual.blocks.size()];
        for (std::size_t i = 0; i < g.weights.size(); ++i)
          fc.weights[i] -= lr * g.weights[i];
        for (std::size_t i = 0; i < g.biases.size(); ++i)
          fc.biases[i] -= lr * g.biases[i];
      }
    }
    auto lib = tiny_cnn(3);
    train::BpfreeParams p;
    p.margin = margin;
    p.learning_rate = lr;
    p.epochs = 1;
    KernelContext c;
    train::bpfree_train(lib, batch, p, c);
    const auto mh = layer_hashes(manual);
    const auto lh = layer_hashes(lib);
    for (std::size_t i = 0; i < mh.size(); ++i)
      require(mh[i] == lh[i],
              "layer " + std::to_string(i) + " hash diverged from the " +
                  "isolated update");
  }
  return "gradients, eta=0 no-op, and layer-isolation hashes hold";
}

// ------------------------------------------------------------ criterion 7 --

std::string check_fastica_recovery() {
  const std::size_t n = 2000;
  std::vector<double> s1(n), s2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 1000.0;
    s1[i] = std::sin(2.0 * M_PI * 5.0 * t);
    s2[i] = std::sin(2.0 * M_PI * 3.0 * t) >= 0 ? 0.8 : -0.8;
  }
  auto corr = [&](std::span<const double> a, std::span<const double> b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double numer = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < n; ++i) {
      numer += (a[i] - ma) * (b[i] - mb);
      da += (a[i] - ma) * (a[i] - ma);
      db += (b[i] - mb) * (b[i] - mb);
    }
    return std::abs(numer / std::sqrt(da * db));
  };

  int converged = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed * 101);
    double a, bmix, c, d;
    do {
      a = rng.uniform(0.2, 1.0);
      bmix = rng.uniform(0.2, 1.0);
      c = rng.uniform(0.2, 1.0);
      d = rng.uniform(0.2, 1.0);
    } while (std::abs(a * d - bmix * c) < 0.15);
    std::vector<double> x(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = a * s1[i] + bmix * s2[i] + 1e-4 * rng.uniform(-1, 1);
      x[n + i] = c * s1[i] + d * s2[i] + 1e-4 * rng.uniform(-1, 1);
    }
    infer::IcaParams p;
    p.n_components = 2;
    p.seed = seed;
    KernelContext ctx;
    const auto r = infer::fastica(x, 2, n, p, ctx);
    if (!r.converged) continue;
    ++converged;
    std::span<const double> r0(r.sources.data(), n);
    std::span<const double> r1(r.sources.data() + n, n);
    const double direct = std::min(corr(r0, s1), corr(r1, s2));
    const double swapped = std::min(corr(r0, s2), corr(r1, s1));
    const double best = std::max(direct, swapped);
    require(best >= 0.95, "seed " + std::to_string(seed) +
                              " recovered correlation " + fmt(best));
  }
  require(converged >= 18,
          "only " + std::to_string(converged) + " of 20 seeds converged");
  return std::to_string(converged) + "/20 converged, all above 0.95";
}

// ------------------------------------------------------------ criterion 8 --

std::string check_main_operations() {
  const std::map<AppId, OpCategory> expected = {
      {AppId::HCL, OpCategory::branches},
      {AppId::SeizDetSVM, OpCategory::fxp_mul},
      {AppId::SeizDetCNN, OpCategory::fxp_mac},
      {AppId::CWM, OpCategory::fxp_mul},
      {AppId::GCL, OpCategory::fp_mac},
      {AppId::CoughDet, OpCategory::fp_mul},
      {AppId::ECL, OpCategory::branches},
      {AppId::BPfree, OpCategory::fp_mac}};
  int matches = 0;
  std::vector<std::string> misses;
  for (AppId app : kAllApps) {
    const auto m =
        report::characterize_app(apps::default_config(app), 1, {1.0, 80e6});
    if (m.dominant == expected.at(app)) {
      ++matches;
    } else {
      misses.push_back(std::string(to_string(app)) + " (expected " +
                       category_name(expected.at(app)) + ", got " +
                       category_name(m.dominant) + ")");
    }
  }
  std::string listed;
  for (const auto& miss : misses)
    listed += (listed.empty() ? "" : "; ") + miss;
  require(matches >= 6, "only " + std::to_string(matches) +
                            "/8 dominant categories match; " + listed);
  return std::to_string(matches) + "/8 match" +
         (listed.empty() ? "" : "; miss: " + listed);
}

// ------------------------------------------------------------ criterion 9 --

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string check_cli_determinism() {
  require(fs::exists(g_cli), "cli binary not found: " + g_cli.string());
  const fs::path tmp = fs::temp_directory_path();
  for (AppId app : kAllApps) {
    const std::string name(to_string(app));
    const fs::path out1 = tmp / ("biobench_det_" + name + "_1.json");
    const fs::path out2 = tmp / ("biobench_det_" + name + "_2.json");
    const std::string base = "\"" + g_cli.string() + "\" run " + name +
                             " --synthetic --seed 7 --format json --data \"" +
                             g_data.string() + "\"";
    const int rc1 =
        std::system((base + " > " + out1.string() + " 2>/dev/null").c_str());
    const int rc2 =
        std::system((base + " > " + out2.string() + " 2>/dev/null").c_str());
    require(rc1 == 0 && rc2 == 0, name + ": cli exited nonzero");
    const std::string a = read_file(out1);
    const std::string b = read_file(out2);
    require(!a.empty(), name + ": empty report");
    require(a == b, name + ": reports differ between invocations");
    fs::remove(out1);
    fs::remove(out2);
  }
  return "all eight apps byte-identical across repeated runs";
}

// ------------------------------------------------------------------ driver --

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<std::string()> body;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance_gate <cli-binary> <data-dir>\n");
    return 2;
  }
  g_cli = argv[1];
  g_data = argv[2];

  const std::vector<Criterion> criteria = {
      {1, "input bandwidths", 1.0, check_bandwidths},
      {2, "energy-table integrity and analytics", 1.0, check_energy_table},
      {3, "duty-cycle bins at 80 MHz", 1.0, check_duty_bins},
      {4, "dsp oracle equivalence", 30.0, check_dsp_oracles},
      {5, "inference oracle equivalence", 30.0, check_inference_oracles},
      {6, "bp-free gradient checks", 60.0, check_bpfree_gradients},
      {7, "fastica source recovery", 30.0, check_fastica_recovery},
      {8, "main-operation categories", 30.0, check_main_operations},
      {9, "cli determinism", 300.0, check_cli_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    try {
      detail = c.body();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (ok && dt > c.budget_s) {
      ok = false;
      detail = "over the " + fmt(c.budget_s) + " s budget";
    }
    if (!ok) ++failures;
    std::printf("[%s] criterion %d: %s - %s (%.3f s)\n", ok ? "PASS" : "FAIL",
                c.id, c.title, detail.c_str(), dt);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
