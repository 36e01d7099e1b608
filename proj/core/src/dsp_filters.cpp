#include <algorithm>
#include <cmath>
#include <deque>

#include "biobench/dsp.hpp"

namespace biobench::dsp {

void moving_average(std::span<const double> x, std::span<double> y,
                    std::size_t window, KernelContext& ctx) {
  if (window == 0) throw DomainError("moving_average: zero window");
  if (y.size() != x.size()) throw DomainError("moving_average: size mismatch");
  double sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i];
    std::size_t len = i + 1;
    if (i >= window) {
      sum -= x[i - window];
      len = window;
    }
    y[i] = sum / static_cast<double>(len);
  }
  ctx.mac(2 * x.size());
  ctx.mul(x.size());
  ctx.mem(2 * x.size());
}

void detrend_moving_average(std::span<const double> x, std::span<double> y,
                            std::size_t window, KernelContext& ctx) {
  moving_average(x, y, window, ctx);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - y[i];
  ctx.mac(x.size());
  ctx.mem(2 * x.size());
}

namespace {

template <typename Better>
void sliding_extreme(std::span<const double> x, std::span<double> y,
                     std::size_t k, KernelContext& ctx, Better better) {
  const std::size_t n = x.size();
  if (y.size() != n) throw DomainError("morphology: size mismatch");
  if (n == 0) throw DomainError("morphology: empty input");
  if (k % 2 == 0 || k == 0 || k > 2 * n - 1)
    throw DomainError("morphology: window must be odd and <= 2n-1");

  const auto h = static_cast<std::int64_t>(k / 2);
  const auto last = static_cast<std::int64_t>(n) - 1;
  auto sample = [&](std::int64_t j) {
    return x[static_cast<std::size_t>(std::clamp<std::int64_t>(j, 0, last))];
  };

  std::deque<std::int64_t> dq;
  std::uint64_t cmp = 0, moves = 0;
  for (std::int64_t j = -h; j <= last + h; ++j) {
    const double v = sample(j);
    while (!dq.empty()) {
      ++cmp;
      if (!better(v, sample(dq.back()))) break;
      dq.pop_back();
      ++moves;
    }
    dq.push_back(j);
    ++moves;
    if (dq.front() <= j - static_cast<std::int64_t>(k)) {
      dq.pop_front();
      ++moves;
    }
    if (j >= h) y[static_cast<std::size_t>(j - h)] = sample(dq.front());
  }
  ctx.branch(cmp);
  ctx.mem(moves + 2 * n);
}

}  // namespace

void erode(std::span<const double> x, std::span<double> y, std::size_t k,
           KernelContext& ctx) {
  sliding_extreme(x, y, k, ctx, [](double a, double b) { return a <= b; });
}

void dilate(std::span<const double> x, std::span<double> y, std::size_t k,
            KernelContext& ctx) {
  sliding_extreme(x, y, k, ctx, [](double a, double b) { return a >= b; });
}

void morph_open(std::span<const double> x, std::span<double> y, std::size_t k,
                KernelContext& ctx) {
  std::vector<double> tmp(x.size());
  erode(x, tmp, k, ctx);
  dilate(tmp, y, k, ctx);
}

void morph_close(std::span<const double> x, std::span<double> y, std::size_t k,
                 KernelContext& ctx) {
  std::vector<double> tmp(x.size());
  dilate(x, tmp, k, ctx);
  erode(tmp, y, k, ctx);
}

void morph_baseline(std::span<const double> x, std::span<double> y,
                    std::size_t k, KernelContext& ctx) {
  // opening removes the peaks, closing the valleys; what is left is drift
  std::vector<double> baseline(x.size());
  morph_open(x, baseline, k, ctx);
  morph_close(baseline, y, k, ctx);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - y[i];
  ctx.mac(x.size());
  ctx.mem(2 * x.size());
}

bool BiquadSection::is_stable() const {
  return std::fabs(a2) < 1.0 && std::fabs(a1) < 1.0 + a2;
}

BiquadCascade::BiquadCascade(std::vector<BiquadSection> sections)
    : sections_(std::move(sections)) {
  if (sections_.empty()) throw DomainError("BiquadCascade: no sections");
  for (const auto& s : sections_)
    if (!s.is_stable()) throw DomainError("BiquadCascade: unstable section");
  s1_.assign(sections_.size(), 0.0);
  s2_.assign(sections_.size(), 0.0);
}

void BiquadCascade::reset() {
  std::fill(s1_.begin(), s1_.end(), 0.0);
  std::fill(s2_.begin(), s2_.end(), 0.0);
}

void BiquadCascade::process(std::span<const double> x, std::span<double> y,
                            KernelContext& ctx) {
  if (y.size() != x.size()) throw DomainError("BiquadCascade: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = x[i];
    for (std::size_t s = 0; s < sections_.size(); ++s) {
      const auto& c = sections_[s];
      const double out = c.b0 * v + s1_[s];
      s1_[s] = c.b1 * v - c.a1 * out + s2_[s];
      s2_[s] = c.b2 * v - c.a2 * out;
      v = out;
    }
    y[i] = v;
  }
  ctx.mac(5 * x.size() * sections_.size());
  ctx.mem(2 * x.size() * sections_.size());
}

void hann_window_periodic(std::span<double> w) {
  const auto n = static_cast<double>(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) / n));
}

}  // namespace biobench::dsp
