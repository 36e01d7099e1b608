#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oracles {

std::vector<std::complex<double>> naive_dft(
    std::span<const std::complex<double>> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      const double th = -2.0 * M_PI * static_cast<double>(k) *
                        static_cast<double>(i) / static_cast<double>(n);
      acc += x[i] * std::complex<double>{std::cos(th), std::sin(th)};
    }
    out[k] = acc;
  }
  return out;
}

std::size_t dft_peak_bin(std::span<const double> x) {
  std::vector<std::complex<double>> cx(x.begin(), x.end());
  const auto spec = naive_dft(cx);
  std::size_t best = 1;
  for (std::size_t k = 1; k <= x.size() / 2; ++k)
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  return best;
}

namespace {

template <typename Op>
std::vector<double> brute_morph(std::span<const double> x, std::size_t k, Op op) {
  const auto n = static_cast<std::int64_t>(x.size());
  const auto h = static_cast<std::int64_t>(k / 2);
  std::vector<double> y(x.size());
  for (std::int64_t i = 0; i < n; ++i) {
    double best = x[static_cast<std::size_t>(std::clamp<std::int64_t>(i - h, 0, n - 1))];
    for (std::int64_t j = i - h; j <= i + h; ++j) {
      const double v = x[static_cast<std::size_t>(std::clamp<std::int64_t>(j, 0, n - 1))];
      best = op(best, v);
    }
    y[static_cast<std::size_t>(i)] = best;
  }
  return y;
}

}  // namespace

std::vector<double> brute_erode(std::span<const double> x, std::size_t k) {
  return brute_morph(x, k, [](double a, double b) { return std::min(a, b); });
}

std::vector<double> brute_dilate(std::span<const double> x, std::size_t k) {
  return brute_morph(x, k, [](double a, double b) { return std::max(a, b); });
}

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw std::invalid_argument("solve_dense: shape");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
    if (std::fabs(a[piv * n + col]) < 1e-300)
      throw std::runtime_error("solve_dense: singular");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i * n + c] * x[c];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

double lomb_reference(std::span<const double> t, std::span<const double> x,
                      double freq_hz) {
  const std::size_t n = t.size();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double ss = 0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(n - 1);
  if (var <= 0) return 0.0;

  const double w = 2.0 * M_PI * freq_hz;
  double scc = 0, scs = 0, sss = 0, sxc = 0, sxs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(w * t[i]), s = std::sin(w * t[i]);
    const double xd = x[i] - mean;
    scc += c * c;
    scs += c * s;
    sss += s * s;
    sxc += xd * c;
    sxs += xd * s;
  }
  const auto ab = solve_dense({scc, scs, scs, sss}, {sxc, sxs});
  const double explained = ab[0] * sxc + ab[1] * sxs;
  return explained / (2.0 * var);
}

std::vector<std::vector<double>> reference_mfcc(std::span<const double> x,
                                                double fs, std::size_t frame,
                                                std::size_t n_mels,
                                                std::size_t n_coeffs) {
  const std::size_t N = frame;
  const std::size_t nbins = N / 2 + 1;
  const std::size_t frames = x.size() / N;
  auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };

  std::vector<double> edges(n_mels + 2);
  const double mhi = mel(fs / 2.0);
  for (std::size_t m = 0; m < n_mels + 2; ++m)
    edges[m] = hz(mhi * static_cast<double>(m) / static_cast<double>(n_mels + 1));

  std::vector<std::vector<double>> out;
  for (std::size_t fr = 0; fr < frames; ++fr) {
    std::vector<std::complex<double>> windowed(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double w =
          0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                static_cast<double>(N)));
      windowed[i] = x[fr * N + i] * w;
    }
    const auto spec = naive_dft(windowed);

    std::vector<double> mel_e(n_mels);
    for (std::size_t m = 0; m < n_mels; ++m) {
      double e = 0;
      for (std::size_t k = 0; k < nbins; ++k) {
        const double f = fs * static_cast<double>(k) / static_cast<double>(N);
        double wgt = 0;
        if (f > edges[m] && f < edges[m + 1])
          wgt = (f - edges[m]) / (edges[m + 1] - edges[m]);
        else if (f >= edges[m + 1] && f < edges[m + 2])
          wgt = (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1]);
        e += wgt * std::norm(spec[k]) / static_cast<double>(N);
      }
      mel_e[m] = std::log(std::max(e, 1e-10));
    }

    std::vector<double> coeffs(n_coeffs);
    for (std::size_t j = 0; j < n_coeffs; ++j) {
      double c = 0;
      for (std::size_t m = 0; m < n_mels; ++m)
        c += mel_e[m] * std::cos(M_PI * static_cast<double>(j) *
                                 (static_cast<double>(m) + 0.5) /
                                 static_cast<double>(n_mels));
      coeffs[j] = c;
    }
    out.push_back(std::move(coeffs));
  }
  return out;
}

}  // namespace oracles
