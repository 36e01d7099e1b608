#include "biobench/train.hpp"

#include <algorithm>
#include <cmath>

namespace biobench::train {

using infer::Activation;
using infer::ConvBlock;
using infer::Cnn1dModel;
using infer::DenseLayer;
using infer::Tensor1d;

namespace {

constexpr double kBnEps = 1e-5;

struct BlockCache {
  Tensor1d input;
  std::vector<double> pre_relu;     // out_ch x conv_len, after batch norm
  std::vector<std::size_t> argmax;  // out_ch x pooled, conv-position index
  Tensor1d output;
};

BlockCache block_forward_cached(const ConvBlock& b, const Tensor1d& x,
                                KernelContext& ctx) {
  b.validate();
  if (x.channels != b.in_ch) throw DomainError("bpfree: block channel mismatch");
  const std::size_t conv_len = x.len - b.kernel + 1;
  const std::size_t pooled = b.out_len(x.len);

  BlockCache cache;
  cache.input = x;
  cache.pre_relu.resize(b.out_ch * conv_len);
  cache.argmax.resize(b.out_ch * pooled);
  cache.output.channels = b.out_ch;
  cache.output.len = pooled;
  cache.output.data.resize(b.out_ch * pooled);

  for (std::size_t oc = 0; oc < b.out_ch; ++oc) {
    const double scale = b.bn_gamma[oc] / std::sqrt(b.bn_var[oc] + kBnEps);
    const double offset = b.bn_beta[oc] - b.bn_mean[oc] * scale;
    for (std::size_t i = 0; i < conv_len; ++i) {
      double acc = 0;
      for (std::size_t ic = 0; ic < b.in_ch; ++ic) {
        const double* w = &b.weights[(oc * b.in_ch + ic) * b.kernel];
        const double* xp = &x.data[ic * x.len + i];
        for (std::size_t k = 0; k < b.kernel; ++k) acc += w[k] * xp[k];
      }
      cache.pre_relu[oc * conv_len + i] = acc * scale + offset;
    }
    for (std::size_t i = 0; i < pooled; ++i) {
      std::size_t best = i * b.pool;
      for (std::size_t p = 1; p < b.pool; ++p)
        if (cache.pre_relu[oc * conv_len + i * b.pool + p] >
            cache.pre_relu[oc * conv_len + best])
          best = i * b.pool + p;
      cache.argmax[oc * pooled + i] = best;
      cache.output.at(oc, i) =
          std::max(0.0, cache.pre_relu[oc * conv_len + best]);
    }
  }
  ctx.mac(b.out_ch * conv_len * (b.in_ch * b.kernel + 2));
  ctx.branch(b.out_ch * pooled * b.pool);
  ctx.mem(b.out_ch * conv_len * b.in_ch * b.kernel);
  return cache;
}

struct DenseCache {
  std::vector<double> input;
  std::vector<double> pre_act;
  std::vector<double> output;
};

DenseCache dense_forward_cached(const DenseLayer& l,
                                std::vector<double> input, KernelContext& ctx) {
  l.validate();
  if (input.size() != l.in) throw DomainError("bpfree: dense input mismatch");
  if (l.activation == Activation::softmax)
    throw DomainError("bpfree: softmax heads are not trained");
  DenseCache cache;
  cache.input = std::move(input);
  cache.pre_act.resize(l.out);
  cache.output.resize(l.out);
  for (std::size_t o = 0; o < l.out; ++o) {
    double acc = l.biases[o];
    const double* w = &l.weights[o * l.in];
    for (std::size_t i = 0; i < l.in; ++i) acc += w[i] * cache.input[i];
    cache.pre_act[o] = acc;
    switch (l.activation) {
      case Activation::relu: cache.output[o] = std::max(0.0, acc); break;
      case Activation::tanh_act: cache.output[o] = std::tanh(acc); break;
      default: cache.output[o] = acc; break;
    }
  }
  ctx.mac(l.in * l.out + l.out);
  ctx.mem(l.in * l.out);
  return cache;
}

/// Forward one sample through layers [0, layer_index), returning the input
/// seen by layer_index (as a tensor for conv layers, flat for dense ones).
Tensor1d forward_prefix(const Cnn1dModel& m, const Tensor1d& x,
                        std::size_t layer_index, KernelContext& ctx) {
  Tensor1d cur = x;
  const std::size_t n_conv = m.blocks.size();
  for (std::size_t b = 0; b < std::min(layer_index, n_conv); ++b)
    cur = infer::conv_block_forward(m.blocks[b], cur, ctx);
  if (layer_index > n_conv) {
    std::vector<double> flat = cur.data;
    for (std::size_t li = n_conv; li < layer_index; ++li) {
      auto c = dense_forward_cached(m.fc[li - n_conv], std::move(flat), ctx);
      flat = std::move(c.output);
    }
    cur.channels = 1;
    cur.len = flat.size();
    cur.data = std::move(flat);
  }
  return cur;
}

struct LayerPass {
  double loss = 0;
  LayerGrads grads;
};

LayerPass layer_pass(const Cnn1dModel& m, const TrainingBatch& batch,
                     std::size_t layer_index, double margin, bool want_grads,
                     KernelContext& ctx) {
  m.validate();
  batch.validate(m);
  const std::size_t n_conv = m.blocks.size();
  const std::size_t n_layers = n_conv + m.fc.size();
  if (layer_index >= n_layers) throw DomainError("bpfree: layer index out of range");
  const std::size_t n = batch.inputs.size();

  std::vector<std::vector<double>> features(n);
  std::vector<BlockCache> bcache;
  std::vector<DenseCache> dcache;
  const bool is_conv = layer_index < n_conv;

  for (std::size_t s = 0; s < n; ++s) {
    const Tensor1d in = forward_prefix(m, batch.inputs[s], layer_index, ctx);
    if (is_conv) {
      auto c = block_forward_cached(m.blocks[layer_index], in, ctx);
      features[s] = c.output.data;
      if (want_grads) bcache.push_back(std::move(c));
    } else {
      auto c = dense_forward_cached(m.fc[layer_index - n_conv], in.data, ctx);
      features[s] = c.output;
      if (want_grads) dcache.push_back(std::move(c));
    }
  }

  LayerPass out;
  out.loss = contrastive_loss(features, batch.labels, margin, ctx);
  if (!want_grads) return out;

  const auto dfeat = contrastive_loss_grad(features, batch.labels, margin, ctx);

  if (is_conv) {
    const auto& b = m.blocks[layer_index];
    out.grads.weights.assign(b.weights.size(), 0.0);
    std::uint64_t macs = 0;
    for (std::size_t s = 0; s < n; ++s) {
      const auto& c = bcache[s];
      const std::size_t conv_len = c.input.len - b.kernel + 1;
      const std::size_t pooled = c.output.len;
      std::vector<double> dconv(b.out_ch * conv_len, 0.0);
      for (std::size_t oc = 0; oc < b.out_ch; ++oc) {
        const double scale = b.bn_gamma[oc] / std::sqrt(b.bn_var[oc] + kBnEps);
        for (std::size_t i = 0; i < pooled; ++i) {
          const std::size_t src = c.argmax[oc * pooled + i];
          if (c.pre_relu[oc * conv_len + src] > 0)
            dconv[oc * conv_len + src] = dfeat[s][oc * pooled + i] * scale;
        }
      }
      for (std::size_t oc = 0; oc < b.out_ch; ++oc)
        for (std::size_t ic = 0; ic < b.in_ch; ++ic)
          for (std::size_t k = 0; k < b.kernel; ++k) {
            double acc = 0;
            const double* d = &dconv[oc * conv_len];
            const double* xp = &c.input.data[ic * c.input.len + k];
            for (std::size_t i = 0; i < conv_len; ++i) acc += d[i] * xp[i];
            out.grads.weights[(oc * b.in_ch + ic) * b.kernel + k] += acc;
          }
      macs += b.out_ch * b.in_ch * b.kernel * conv_len;
    }
    ctx.mac(macs);
    ctx.mem(macs);
  } else {
    const auto& l = m.fc[layer_index - n_conv];
    out.grads.weights.assign(l.weights.size(), 0.0);
    out.grads.biases.assign(l.out, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const auto& c = dcache[s];
      for (std::size_t o = 0; o < l.out; ++o) {
        double dpre = dfeat[s][o];
        if (l.activation == Activation::relu && c.pre_act[o] <= 0) dpre = 0;
        if (l.activation == Activation::tanh_act) {
          const double th = std::tanh(c.pre_act[o]);
          dpre *= 1.0 - th * th;
        }
        if (dpre == 0) continue;
        for (std::size_t i = 0; i < l.in; ++i)
          out.grads.weights[o * l.in + i] += dpre * c.input[i];
        out.grads.biases[o] += dpre;
      }
    }
    ctx.mac(n * l.in * l.out);
    ctx.mem(n * l.in * l.out);
  }
  return out;
}

}  // namespace

void TrainingBatch::validate(const Cnn1dModel& m) const {
  if (inputs.size() < 2) throw DomainError("TrainingBatch: need at least two samples");
  if (labels.size() != inputs.size())
    throw DomainError("TrainingBatch: label count mismatch");
  for (const auto& t : inputs)
    if (t.channels != m.in_ch || t.len != m.in_len ||
        t.data.size() != t.channels * t.len)
      throw DomainError("TrainingBatch: sample shape mismatch");
}

double contrastive_loss(std::span<const std::vector<double>> features,
                        std::span<const int> labels, double margin,
                        KernelContext& ctx) {
  const std::size_t n = features.size();
  if (n < 2) throw DomainError("contrastive_loss: need at least two samples");
  if (labels.size() != n) throw DomainError("contrastive_loss: label count mismatch");
  const std::size_t dim = features[0].size();
  for (const auto& f : features)
    if (f.size() != dim) throw DomainError("contrastive_loss: ragged features");

  double same_acc = 0, diff_acc = 0;
  std::size_t same_pairs = 0, diff_pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = features[i][k] - features[j][k];
        d2 += d * d;
      }
      if (labels[i] == labels[j]) {
        same_acc += d2;
        ++same_pairs;
      } else {
        const double short_fall = margin - std::sqrt(d2);
        if (short_fall > 0) diff_acc += short_fall * short_fall;
        ++diff_pairs;
      }
    }
  ctx.mac(n * (n - 1) / 2 * 2 * dim);
  ctx.mul(diff_pairs * 3);
  ctx.branch(n * (n - 1) / 2);
  double loss = 0;
  if (same_pairs > 0) loss += same_acc / static_cast<double>(same_pairs);
  if (diff_pairs > 0) loss += diff_acc / static_cast<double>(diff_pairs);
  return loss;
}

std::vector<std::vector<double>> contrastive_loss_grad(
    std::span<const std::vector<double>> features, std::span<const int> labels,
    double margin, KernelContext& ctx) {
  const std::size_t n = features.size();
  if (n < 2) throw DomainError("contrastive_loss_grad: need at least two samples");
  if (labels.size() != n)
    throw DomainError("contrastive_loss_grad: label count mismatch");
  const std::size_t dim = features[0].size();

  std::size_t same_pairs = 0, diff_pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      (labels[i] == labels[j] ? same_pairs : diff_pairs) += 1;

  std::vector<std::vector<double>> grad(n, std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = features[i][k] - features[j][k];
        d2 += d * d;
      }
      if (labels[i] == labels[j]) {
        const double c = 2.0 / static_cast<double>(same_pairs);
        for (std::size_t k = 0; k < dim; ++k) {
          const double d = features[i][k] - features[j][k];
          grad[i][k] += c * d;
          grad[j][k] -= c * d;
        }
      } else {
        const double dist = std::sqrt(d2);
        if (dist >= margin || dist < 1e-12) continue;
        // d/dfi (margin - dist)^2 = -2 (margin - dist) (fi - fj) / dist
        const double c =
            -2.0 * (margin - dist) / (dist * static_cast<double>(diff_pairs));
        for (std::size_t k = 0; k < dim; ++k) {
          const double d = features[i][k] - features[j][k];
          grad[i][k] += c * d;
          grad[j][k] -= c * d;
        }
      }
    }
  ctx.mac(n * (n - 1) * 2 * dim);
  ctx.mul(diff_pairs * 4);
  ctx.branch(n * (n - 1) / 2);
  return grad;
}

double bpfree_layer_loss(const Cnn1dModel& m, const TrainingBatch& batch,
                         std::size_t layer_index, double margin,
                         KernelContext& ctx) {
  return layer_pass(m, batch, layer_index, margin, false, ctx).loss;
}

LayerGrads bpfree_layer_grad(const Cnn1dModel& m, const TrainingBatch& batch,
                             std::size_t layer_index, double margin,
                             KernelContext& ctx) {
  return std::move(layer_pass(m, batch, layer_index, margin, true, ctx).grads);
}

EpochStats bpfree_train_epoch(Cnn1dModel& m, const TrainingBatch& batch,
                              const BpfreeParams& params, KernelContext& ctx) {
  if (!(params.margin > 0)) throw DomainError("bpfree: margin must be positive");
  // Zero is allowed: it freezes the parameters while still reporting
  // per-layer losses, which is useful for evaluation sweeps.
  if (!(params.learning_rate >= 0))
    throw DomainError("bpfree: learning rate must be non-negative");
  const std::size_t n_conv = m.blocks.size();
  const std::size_t n_layers = n_conv + m.fc.size();

  EpochStats stats;
  for (std::size_t l = 0; l < n_layers; ++l) {
    auto pass = layer_pass(m, batch, l, params.margin, true, ctx);
    stats.layer_losses.push_back(pass.loss);
    if (l < n_conv) {
      auto& w = m.blocks[l].weights;
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] -= params.learning_rate * pass.grads.weights[i];
    } else {
      auto& fc = m.fc[l - n_conv];
      for (std::size_t i = 0; i < fc.weights.size(); ++i)
        fc.weights[i] -= params.learning_rate * pass.grads.weights[i];
      for (std::size_t i = 0; i < fc.biases.size(); ++i)
        fc.biases[i] -= params.learning_rate * pass.grads.biases[i];
    }
    ctx.mac(pass.grads.weights.size() + pass.grads.biases.size());
  }
  return stats;
}

std::vector<EpochStats> bpfree_train(Cnn1dModel& m, const TrainingBatch& batch,
                                     const BpfreeParams& params,
                                     KernelContext& ctx) {
  if (params.epochs == 0) throw DomainError("bpfree: need at least one epoch");
  std::vector<EpochStats> out;
  for (std::size_t e = 0; e < params.epochs; ++e)
    out.push_back(bpfree_train_epoch(m, batch, params, ctx));
  return out;
}

}  // namespace biobench::train
