#include <algorithm>
#include <cmath>
#include <limits>

#include "biobench/infer.hpp"

namespace biobench::infer {

namespace {

constexpr double kBnEps = 1e-5;

std::int16_t sat16(std::int64_t v) {
  return static_cast<std::int16_t>(std::clamp<std::int64_t>(v, -32768, 32767));
}

std::int32_t sat32(std::int64_t v) {
  return static_cast<std::int32_t>(std::clamp<std::int64_t>(
      v, std::numeric_limits<std::int32_t>::min(),
      std::numeric_limits<std::int32_t>::max()));
}

/// Largest power-of-two scale that keeps |w|*2^s inside int16.
int quant_shift(double max_abs) {
  if (max_abs <= 0) return 15;
  int s = static_cast<int>(std::floor(std::log2(32767.0 / max_abs)));
  return std::clamp(s, 0, 18);
}

}  // namespace

// ------------------------------------------------------------- fp forward --

void ConvBlock::validate() const {
  if (in_ch == 0 || out_ch == 0 || kernel == 0 || pool == 0)
    throw DomainError("ConvBlock: zero dimension");
  if (weights.size() != out_ch * in_ch * kernel)
    throw DomainError("ConvBlock: weight shape");
  if (bn_gamma.size() != out_ch || bn_beta.size() != out_ch ||
      bn_mean.size() != out_ch || bn_var.size() != out_ch)
    throw DomainError("ConvBlock: batch-norm shape");
  for (double v : bn_var)
    if (!(v >= 0)) throw DomainError("ConvBlock: negative batch-norm variance");
}

std::size_t ConvBlock::out_len(std::size_t in_len) const {
  if (in_len < kernel) throw DomainError("ConvBlock: input shorter than kernel");
  return (in_len - kernel + 1) / pool;
}

Tensor1d conv_block_forward(const ConvBlock& b, const Tensor1d& x,
                            KernelContext& ctx) {
  b.validate();
  if (x.channels != b.in_ch) throw DomainError("conv_block_forward: channel mismatch");
  const std::size_t conv_len = x.len - b.kernel + 1;
  const std::size_t pooled = b.out_len(x.len);

  Tensor1d out;
  out.channels = b.out_ch;
  out.len = pooled;
  out.data.assign(b.out_ch * pooled, 0.0);

  std::vector<double> row(conv_len);
  for (std::size_t oc = 0; oc < b.out_ch; ++oc) {
    const double inv = 1.0 / std::sqrt(b.bn_var[oc] + kBnEps);
    const double scale = b.bn_gamma[oc] * inv;
    const double offset = b.bn_beta[oc] - b.bn_mean[oc] * scale;
    for (std::size_t i = 0; i < conv_len; ++i) {
      double acc = 0;
      for (std::size_t ic = 0; ic < b.in_ch; ++ic) {
        const double* w = &b.weights[(oc * b.in_ch + ic) * b.kernel];
        const double* xp = &x.data[ic * x.len + i];
        for (std::size_t k = 0; k < b.kernel; ++k) acc += w[k] * xp[k];
      }
      row[i] = std::max(0.0, acc * scale + offset);
    }
    for (std::size_t i = 0; i < pooled; ++i) {
      double best = row[i * b.pool];
      for (std::size_t p = 1; p < b.pool; ++p)
        best = std::max(best, row[i * b.pool + p]);
      out.at(oc, i) = best;
    }
  }
  ctx.mac(b.out_ch * conv_len * b.in_ch * b.kernel + 2 * b.out_ch * conv_len);
  ctx.branch(b.out_ch * (conv_len + pooled * (b.pool - 1)));
  ctx.mem(b.out_ch * conv_len * b.in_ch * b.kernel + b.out_ch * pooled);
  return out;
}

void Cnn1dModel::validate() const {
  if (in_ch == 0 || in_len == 0) throw DomainError("Cnn1dModel: zero input shape");
  if (blocks.empty() || fc.empty())
    throw DomainError("Cnn1dModel: need at least one conv block and one dense layer");
  std::size_t ch = in_ch, len = in_len;
  for (const auto& b : blocks) {
    b.validate();
    if (b.in_ch != ch) throw DomainError("Cnn1dModel: conv chain channel mismatch");
    len = b.out_len(len);
    if (len == 0) throw DomainError("Cnn1dModel: feature map vanished");
    ch = b.out_ch;
  }
  std::size_t feat = ch * len;
  for (const auto& l : fc) {
    l.validate();
    if (l.in != feat) throw DomainError("Cnn1dModel: dense chain size mismatch");
    feat = l.out;
  }
}

std::size_t Cnn1dModel::flat_features() const {
  std::size_t ch = in_ch, len = in_len;
  for (const auto& b : blocks) {
    len = b.out_len(len);
    ch = b.out_ch;
  }
  return ch * len;
}

std::size_t Cnn1dModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.weights.size() + 2 * b.out_ch;
  for (const auto& l : fc) n += l.weights.size() + l.biases.size();
  return n;
}

std::vector<double> cnn_forward(const Cnn1dModel& m, const Tensor1d& x,
                                KernelContext& ctx) {
  m.validate();
  if (x.channels != m.in_ch || x.len != m.in_len)
    throw DomainError("cnn_forward: input shape mismatch");
  Tensor1d cur = x;
  for (const auto& b : m.blocks) cur = conv_block_forward(b, cur, ctx);
  return mlp_forward(m.fc, cur.data, ctx);
}

// -------------------------------------------------------------- quantized --

std::size_t QConvLayer::out_len(std::size_t in_len) const {
  if (in_len < kernel) throw DomainError("QConvLayer: input shorter than kernel");
  return (in_len - kernel + 1) / pool;
}

void QCnnModel::validate() const {
  if (in_ch == 0 || in_len == 0) throw DomainError("QCnnModel: zero input shape");
  if (conv.empty() || fc.empty()) throw DomainError("QCnnModel: missing layers");
  std::size_t ch = in_ch, len = in_len;
  for (const auto& b : conv) {
    if (b.in_ch != ch) throw DomainError("QCnnModel: conv chain channel mismatch");
    if (b.weights.size() != b.out_ch * b.in_ch * b.kernel || b.biases.size() != b.out_ch)
      throw DomainError("QCnnModel: conv layer shape");
    len = b.out_len(len);
    ch = b.out_ch;
  }
  std::size_t feat = ch * len;
  for (const auto& l : fc) {
    if (l.weights.size() != l.in * l.out || l.biases.size() != l.out)
      throw DomainError("QCnnModel: dense layer shape");
    if (l.in != feat) throw DomainError("QCnnModel: dense chain size mismatch");
    feat = l.out;
  }
}

std::size_t QCnnModel::device_static_bytes() const {
  std::size_t b = 0;
  for (const auto& l : conv) b += 2 * l.weights.size() + 4 * l.biases.size();
  for (const auto& l : fc) b += 2 * l.weights.size() + 4 * l.biases.size();
  return b;
}

QCnnModel quantize_cnn(const Cnn1dModel& m) {
  m.validate();
  QCnnModel q;
  q.in_ch = m.in_ch;
  q.in_len = m.in_len;

  for (const auto& b : m.blocks) {
    QConvLayer l;
    l.in_ch = b.in_ch;
    l.out_ch = b.out_ch;
    l.kernel = b.kernel;
    l.pool = b.pool;

    std::vector<double> folded(b.weights.size());
    std::vector<double> bias(b.out_ch);
    double max_abs = 0;
    for (std::size_t oc = 0; oc < b.out_ch; ++oc) {
      const double scale = b.bn_gamma[oc] / std::sqrt(b.bn_var[oc] + kBnEps);
      bias[oc] = b.bn_beta[oc] - b.bn_mean[oc] * scale;
      for (std::size_t i = 0; i < b.in_ch * b.kernel; ++i) {
        const std::size_t idx = oc * b.in_ch * b.kernel + i;
        folded[idx] = b.weights[idx] * scale;
        max_abs = std::max(max_abs, std::fabs(folded[idx]));
      }
    }
    l.shift = quant_shift(max_abs);
    const double ws = std::ldexp(1.0, l.shift);
    l.weights.resize(folded.size());
    for (std::size_t i = 0; i < folded.size(); ++i)
      l.weights[i] = sat16(std::llround(folded[i] * ws));
    l.biases.resize(b.out_ch);
    for (std::size_t oc = 0; oc < b.out_ch; ++oc)
      l.biases[oc] = std::llround(bias[oc] * std::ldexp(1.0, l.shift + 15));
    q.conv.push_back(std::move(l));
  }

  for (const auto& d : m.fc) {
    QDenseLayer l;
    l.in = d.in;
    l.out = d.out;
    l.relu = d.activation == Activation::relu;
    double max_abs = 0;
    for (double w : d.weights) max_abs = std::max(max_abs, std::fabs(w));
    l.shift = quant_shift(max_abs);
    const double ws = std::ldexp(1.0, l.shift);
    l.weights.resize(d.weights.size());
    for (std::size_t i = 0; i < d.weights.size(); ++i)
      l.weights[i] = sat16(std::llround(d.weights[i] * ws));
    l.biases.resize(d.out);
    for (std::size_t o = 0; o < d.out; ++o)
      l.biases[o] = std::llround(d.biases[o] * std::ldexp(1.0, l.shift + 15));
    q.fc.push_back(std::move(l));
  }
  q.validate();
  return q;
}

std::vector<std::int32_t> qcnn_forward(const QCnnModel& m,
                                       std::span<const std::int16_t> x,
                                       KernelContext& ctx) {
  m.validate();
  if (x.size() != m.in_ch * m.in_len)
    throw DomainError("qcnn_forward: input shape mismatch");

  std::vector<std::int16_t> cur(x.begin(), x.end());
  std::size_t ch = m.in_ch, len = m.in_len;
  std::uint64_t macs = 0, cmps = 0;

  for (const auto& b : m.conv) {
    const std::size_t conv_len = len - b.kernel + 1;
    const std::size_t pooled = b.out_len(len);
    std::vector<std::int16_t> next(b.out_ch * pooled);
    std::vector<std::int16_t> row(conv_len);
    for (std::size_t oc = 0; oc < b.out_ch; ++oc) {
      for (std::size_t i = 0; i < conv_len; ++i) {
        std::int64_t acc = b.biases[oc];
        for (std::size_t ic = 0; ic < b.in_ch; ++ic) {
          const std::int16_t* w = &b.weights[(oc * b.in_ch + ic) * b.kernel];
          const std::int16_t* xp = &cur[ic * len + i];
          for (std::size_t k = 0; k < b.kernel; ++k)
            acc += static_cast<std::int64_t>(w[k]) * xp[k];
        }
        const std::int16_t v = sat16(acc >> b.shift);  // truncating, like the port
        row[i] = std::max<std::int16_t>(0, v);
      }
      for (std::size_t i = 0; i < pooled; ++i) {
        std::int16_t best = row[i * b.pool];
        for (std::size_t p = 1; p < b.pool; ++p)
          best = std::max(best, row[i * b.pool + p]);
        next[oc * pooled + i] = best;
      }
    }
    macs += b.out_ch * conv_len * b.in_ch * b.kernel;
    cmps += b.out_ch * (conv_len + pooled * (b.pool - 1));
    cur = std::move(next);
    ch = b.out_ch;
    len = pooled;
  }
  (void)ch;

  std::vector<std::int32_t> wide(cur.begin(), cur.end());
  for (std::size_t li = 0; li < m.fc.size(); ++li) {
    const auto& l = m.fc[li];
    std::vector<std::int32_t> next(l.out);
    for (std::size_t o = 0; o < l.out; ++o) {
      std::int64_t acc = l.biases[o];
      const std::int16_t* w = &l.weights[o * l.in];
      for (std::size_t i = 0; i < l.in; ++i)
        acc += static_cast<std::int64_t>(w[i]) * wide[i];
      std::int32_t v = sat32(acc >> l.shift);
      if (l.relu) v = std::max(0, v);
      next[o] = v;
    }
    macs += l.in * l.out;
    if (l.relu) cmps += l.out;
    // intermediate activations go back to 16-bit storage
    if (li + 1 < m.fc.size())
      for (auto& v : next) v = sat16(v);
    wide = std::move(next);
  }

  ctx.mac_fxp(macs);
  ctx.branch(cmps);
  ctx.mem(2 * macs);
  return wide;
}

}  // namespace biobench::infer
