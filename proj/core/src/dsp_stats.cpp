#include <cmath>
#include <numeric>

#include "biobench/dsp.hpp"

namespace biobench::dsp {

namespace {

double population_variance(std::span<const double> x, double mean) {
  double s = 0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / static_cast<double>(x.size());
}

}  // namespace

StatFeatures stat_features(std::span<const double> x, KernelContext& ctx) {
  const std::size_t n = x.size();
  if (n < 3) throw DomainError("stat_features: need at least three samples");

  StatFeatures f;
  f.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);

  double m2 = 0, m3 = 0, m4 = 0, sq = 0;
  for (double v : x) {
    const double d = v - f.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
    sq += v * v;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  f.variance = m2;
  f.stddev = std::sqrt(m2);
  f.rms = std::sqrt(sq / static_cast<double>(n));
  if (m2 > 0) {
    f.skewness = m3 / (m2 * f.stddev);
    f.kurtosis = m4 / (m2 * m2);
  }

  std::uint64_t crossings = 0;
  double ll = 0;
  auto sign = [](double v) { return v >= 0 ? 1 : -1; };
  for (std::size_t i = 1; i < n; ++i) {
    if (sign(x[i]) != sign(x[i - 1])) ++crossings;
    ll += std::fabs(x[i] - x[i - 1]);
  }
  f.zero_cross_rate = static_cast<double>(crossings) / static_cast<double>(n - 1);
  f.line_length = ll / static_cast<double>(n - 1);

  // Hjorth parameters from first and second differences
  std::vector<double> d1(n - 1);
  for (std::size_t i = 1; i < n; ++i) d1[i - 1] = x[i] - x[i - 1];
  const double mean_d1 =
      std::accumulate(d1.begin(), d1.end(), 0.0) / static_cast<double>(n - 1);
  const double var_d1 = population_variance(d1, mean_d1);
  if (m2 > 0) f.hjorth_mobility = std::sqrt(var_d1 / m2);
  if (f.hjorth_mobility > 0 && n >= 4) {
    std::vector<double> d2v(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) d2v[i - 1] = d1[i] - d1[i - 1];
    const double mean_d2 =
        std::accumulate(d2v.begin(), d2v.end(), 0.0) / static_cast<double>(n - 2);
    const double var_d2 = population_variance(d2v, mean_d2);
    if (var_d1 > 0)
      f.hjorth_complexity = std::sqrt(var_d2 / var_d1) / f.hjorth_mobility;
  }

  ctx.mac(10 * n);
  ctx.mul(6 * n + 16);
  ctx.branch(2 * n);
  ctx.mem(4 * n);
  return f;
}

std::vector<double> lpc(std::span<const double> x, std::size_t order,
                        KernelContext& ctx) {
  const std::size_t n = x.size();
  if (order == 0 || order >= n) throw DomainError("lpc: order must be in [1, n)");

  std::vector<double> r(order + 1, 0.0);
  for (std::size_t k = 0; k <= order; ++k)
    for (std::size_t i = 0; i + k < n; ++i) r[k] += x[i] * x[i + k];
  if (r[0] <= 0) throw NumericError("lpc: signal has no energy");

  std::vector<double> a(order + 1, 0.0), prev(order + 1, 0.0);
  double err = r[0];
  for (std::size_t m = 1; m <= order; ++m) {
    double acc = r[m];
    for (std::size_t i = 1; i < m; ++i) acc -= a[i] * r[m - i];
    const double k = acc / err;
    prev = a;
    a[m] = k;
    for (std::size_t i = 1; i < m; ++i) a[i] = prev[i] - k * prev[m - i];
    err *= 1.0 - k * k;
    if (err <= 0) throw NumericError("lpc: lost positive definiteness");
  }
  ctx.mac(n * (order + 1) + order * order);
  ctx.mul(3 * order);
  ctx.mem(n + 3 * order);
  return {a.begin() + 1, a.end()};
}

std::vector<double> relative_energy(std::span<const double> x,
                                    std::size_t w_short, std::size_t w_long,
                                    KernelContext& ctx) {
  if (w_short == 0 || w_long <= w_short)
    throw DomainError("relative_energy: need 0 < w_short < w_long");
  const std::size_t n = x.size();
  std::vector<double> score(n, 0.0);
  double es = 0, el = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sq = x[i] * x[i];
    es += sq;
    el += sq;
    std::size_t ls = i + 1, ll = i + 1;
    if (i >= w_short) {
      es -= x[i - w_short] * x[i - w_short];
      ls = w_short;
    }
    if (i >= w_long) {
      el -= x[i - w_long] * x[i - w_long];
      ll = w_long;
    }
    const double num = es / static_cast<double>(ls);
    const double den = el / static_cast<double>(ll);
    score[i] = den > 1e-12 ? num / den : 0.0;
  }
  ctx.mac(4 * n);
  ctx.mul(4 * n);
  ctx.branch(n);
  ctx.mem(3 * n);
  return score;
}

std::vector<std::size_t> detect_peaks(std::span<const double> score, double fs,
                                      const PeakParams& params,
                                      KernelContext& ctx) {
  if (!(fs > 0)) throw DomainError("detect_peaks: fs must be positive");
  const auto refractory =
      static_cast<std::size_t>(std::llround(params.refractory_s * fs));
  std::vector<std::size_t> peaks;
  const std::size_t n = score.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (score[i] < params.threshold) continue;
    if (!(score[i] > score[i - 1] && score[i] >= score[i + 1])) continue;
    if (!peaks.empty() && i - peaks.back() < refractory) {
      if (score[i] > score[peaks.back()]) peaks.back() = i;
    } else {
      peaks.push_back(i);
    }
  }
  ctx.branch(2 * n + peaks.size());
  ctx.mem(peaks.size());
  return peaks;
}

}  // namespace biobench::dsp
