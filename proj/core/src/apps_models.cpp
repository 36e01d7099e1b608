#include <cmath>
#include <functional>

#include "apps_detail.hpp"
#include "biobench/rng.hpp"

namespace biobench::apps {

namespace detail {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

infer::SvmModel make_svm_model(std::uint64_t seed, std::size_t dim) {
  Rng rng(seed);
  infer::SvmModel m;
  m.kernel = infer::SvmKernel::rbf;
  m.dim = dim;
  m.gamma = 0.1;
  const std::size_t n_sv = 10;
  m.support_vectors.resize(n_sv * dim);
  for (auto& v : m.support_vectors) v = rng.gaussian();
  m.dual_coeffs.resize(n_sv);
  for (std::size_t i = 0; i < n_sv; ++i)
    m.dual_coeffs[i] = (i % 2 == 0 ? 1.0 : -1.0) * rng.uniform(0.1, 1.0);
  m.bias = rng.uniform(-0.5, 0.5);
  return m;
}

infer::ForestModel make_forest_model(std::uint64_t seed, std::size_t features,
                                     std::size_t trees, int depth) {
  Rng rng(seed);
  infer::ForestModel m;
  m.n_features = features;
  m.trees.resize(trees);
  for (auto& tree : m.trees) {
    // Recursive random growth; children are appended after their parent, so
    // indices are assigned before the vector can reallocate under us.
    std::function<int(int)> grow = [&](int d) -> int {
      const int idx = static_cast<int>(tree.size());
      tree.emplace_back();
      if (d >= depth || rng.uniform() < 0.25) {
        tree[idx].value = rng.uniform();
        return idx;
      }
      tree[idx].feature = static_cast<int>(rng.below(features));
      tree[idx].threshold = rng.gaussian();
      const int l = grow(d + 1);
      const int r = grow(d + 1);
      tree[idx].left = l;
      tree[idx].right = r;
      return idx;
    };
    grow(0);
  }
  return m;
}

infer::KnnTrainingSet make_knn_training_set(std::uint64_t seed, std::size_t n) {
  // Two clusters in (ppg mean, gsr mean, skin temperature) space, sized to
  // the synthetic sensor operating points.
  static constexpr double kCenter[2][3] = {{2.0e6, 5.0e5, 3300},
                                           {2.15e6, 5.8e5, 3420}};
  static constexpr double kSpread[3] = {3e4, 8e3, 40};
  Rng rng(seed);
  infer::KnnTrainingSet set;
  set.dim = 3;
  set.points.resize(n * 3);
  set.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    set.labels[i] = label;
    for (std::size_t d = 0; d < 3; ++d)
      set.points[i * 3 + d] = kCenter[label][d] + kSpread[d] * rng.gaussian();
  }
  return set;
}

std::vector<infer::DenseLayer> make_mlp_model(std::uint64_t seed,
                                              std::size_t in,
                                              std::size_t hidden,
                                              std::size_t out) {
  Rng rng(seed);
  auto dense = [&](std::size_t i, std::size_t o, infer::Activation act) {
    infer::DenseLayer l;
    l.in = i;
    l.out = o;
    l.activation = act;
    l.weights.resize(i * o);
    const double scale = std::sqrt(2.0 / static_cast<double>(i));
    for (auto& w : l.weights) w = scale * rng.gaussian();
    l.biases.assign(o, 0.0);
    for (auto& b : l.biases) b = rng.uniform(-0.1, 0.1);
    return l;
  };
  std::vector<infer::DenseLayer> layers;
  layers.push_back(dense(in, hidden, infer::Activation::relu));
  layers.push_back(dense(hidden, out, infer::Activation::softmax));
  return layers;
}

infer::Cnn1dModel make_cnn_model(std::uint64_t seed, std::size_t in_ch,
                                 std::size_t in_len) {
  Rng rng(seed);
  infer::Cnn1dModel m;
  m.in_ch = in_ch;
  m.in_len = in_len;
  std::size_t ch = in_ch;
  for (int b = 0; b < 3; ++b) {
    infer::ConvBlock blk;
    blk.in_ch = ch;
    blk.out_ch = 16;
    blk.kernel = 5;
    blk.pool = 4;
    blk.weights.resize(blk.out_ch * blk.in_ch * blk.kernel);
    const double scale = std::sqrt(2.0 / static_cast<double>(blk.in_ch * blk.kernel));
    for (auto& w : blk.weights) w = scale * rng.gaussian();
    blk.bn_gamma.resize(blk.out_ch);
    blk.bn_beta.resize(blk.out_ch);
    blk.bn_mean.resize(blk.out_ch);
    blk.bn_var.resize(blk.out_ch);
    for (std::size_t c = 0; c < blk.out_ch; ++c) {
      blk.bn_gamma[c] = rng.uniform(0.5, 1.5);
      blk.bn_beta[c] = rng.uniform(-0.1, 0.1);
      blk.bn_mean[c] = rng.uniform(-0.05, 0.05);
      blk.bn_var[c] = rng.uniform(0.5, 1.5);
    }
    m.blocks.push_back(std::move(blk));
    ch = 16;
  }
  std::size_t len = in_len;
  for (const auto& b : m.blocks) len = b.out_len(len);
  const std::size_t flat = ch * len;

  auto dense = [&](std::size_t i, std::size_t o, infer::Activation act) {
    infer::DenseLayer l;
    l.in = i;
    l.out = o;
    l.activation = act;
    l.weights.resize(i * o);
    const double scale = std::sqrt(2.0 / static_cast<double>(i));
    for (auto& w : l.weights) w = scale * rng.gaussian();
    l.biases.resize(o);
    for (auto& bb : l.biases) bb = rng.uniform(-0.05, 0.05);
    return l;
  };
  m.fc.push_back(dense(flat, 128, infer::Activation::relu));
  m.fc.push_back(dense(128, 2, infer::Activation::none));
  m.validate();
  return m;
}

train::TrainingBatch make_bpfree_batch(std::uint64_t seed,
                                       const infer::Cnn1dModel& model) {
  Rng rng(seed);
  train::TrainingBatch batch;
  batch.labels = {0, 0, 1, 1};
  for (int s = 0; s < 4; ++s) {
    const int label = batch.labels[static_cast<std::size_t>(s)];
    // class 0: slow oscillation; class 1: fast oscillation
    const double cycles = label == 0 ? 3.0 : 17.0;
    infer::Tensor1d x;
    x.channels = model.in_ch;
    x.len = model.in_len;
    x.data.resize(x.channels * x.len);
    for (std::size_t c = 0; c < x.channels; ++c) {
      const double phase = rng.uniform(0.0, 2 * kPi);
      for (std::size_t i = 0; i < x.len; ++i)
        x.at(c, i) = 0.4 * std::sin(2 * kPi * cycles * i / x.len + phase) +
                     0.05 * rng.uniform(-1.0, 1.0);
    }
    batch.inputs.push_back(std::move(x));
  }
  batch.validate(model);
  return batch;
}

ArithAttribution attribution_for(const AppConfig& config) {
  return config.arithmetic == "fp32" ? ArithAttribution::fp
                                     : ArithAttribution::fxp;
}

}  // namespace detail

// ----------------------------------------------------------- pipeline base --

Pipeline::Pipeline(AppConfig config) : config_(std::move(config)) {
  config_.validate();
}

ClassificationResult Pipeline::process_window(const WindowInput& input) {
  if (input.buffers.size() != config_.specs.size())
    throw DataError("window carries " + std::to_string(input.buffers.size()) +
                    " signals, config expects " +
                    std::to_string(config_.specs.size()));
  for (std::size_t i = 0; i < input.buffers.size(); ++i) {
    if (!(input.buffers[i].spec() == config_.specs[i]))
      throw DataError("signal " + std::to_string(i) +
                      " does not match the configured spec");
    if (input.buffers[i].window_seconds() != config_.window_seconds)
      throw DataError("signal " + std::to_string(i) + " covers the wrong window");
  }

  stages_.clear();
  totals_.reset();
  ledger_.reset_run();
  KernelContext ctx(detail::attribution_for(config_));
  stage_mark_ = OpCounters{};

  ClassificationResult result = run(input, ctx);

  // Anything counted outside a named stage still shows up in the breakdown.
  const OpCounters tail = ctx.counters() - stage_mark_;
  if (tail.total() > 0) stages_.push_back({"untracked", tail});
  totals_ = ctx.counters();
  has_run_ = true;
  return result;
}

void Pipeline::close_stage(const std::string& name, KernelContext& ctx) {
  const OpCounters delta = ctx.counters() - stage_mark_;
  stage_mark_ = ctx.counters();
  for (auto& s : stages_)
    if (s.name == name) {
      s.ops += delta;
      return;
    }
  stages_.push_back({name, delta});
}

const OpCounters& Pipeline::counters() const { return totals_; }

std::span<const StageStats> Pipeline::stage_stats() const { return stages_; }

std::unique_ptr<Pipeline> build_app(const AppConfig& config) {
  config.validate();
  switch (config.app) {
    case AppId::HCL: return detail::build_hcl(config);
    case AppId::SeizDetSVM: return detail::build_seizdetsvm(config);
    case AppId::SeizDetCNN: return detail::build_seizdetcnn(config);
    case AppId::CWM: return detail::build_cwm(config);
    case AppId::GCL: return detail::build_gcl(config);
    case AppId::CoughDet: return detail::build_coughdet(config);
    case AppId::ECL: return detail::build_ecl(config);
    case AppId::BPfree: return detail::build_bpfree(config);
  }
  throw ConfigError("unknown application id");
}

}  // namespace biobench::apps
