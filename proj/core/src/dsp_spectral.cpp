#include <algorithm>
#include <cmath>
#include <numeric>

#include "biobench/dsp.hpp"

namespace biobench::dsp {

namespace {

bool is_pow2(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

int log2_size(std::size_t n) {
  int s = 0;
  while ((std::size_t{1} << s) < n) ++s;
  return s;
}

template <typename T>
void bit_reverse_permute(std::span<T> a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
}

std::int16_t sat16(std::int32_t v) {
  return static_cast<std::int16_t>(std::clamp<std::int32_t>(v, -32768, 32767));
}

}  // namespace

void fft_radix2(std::span<std::complex<double>> buf, KernelContext& ctx) {
  const std::size_t n = buf.size();
  if (!is_pow2(n)) throw DomainError("fft_radix2: size must be a power of two >= 2");
  bit_reverse_permute(buf);

  for (std::size_t m = 2; m <= n; m <<= 1) {
    const std::complex<double> wm = std::polar(1.0, -2.0 * M_PI / static_cast<double>(m));
    for (std::size_t k = 0; k < n; k += m) {
      std::complex<double> w{1.0, 0.0};
      for (std::size_t j = 0; j < m / 2; ++j) {
        const std::complex<double> t = w * buf[k + j + m / 2];
        const std::complex<double> u = buf[k + j];
        buf[k + j] = u + t;
        buf[k + j + m / 2] = u - t;
        w *= wm;
      }
    }
  }
  const auto stages = static_cast<std::uint64_t>(log2_size(n));
  ctx.mul(2 * n * stages);
  ctx.mac(n * stages);
  ctx.mem(2 * n * stages);
}

int fft_radix2_q15(std::span<std::int16_t> re, std::span<std::int16_t> im,
                   KernelContext& ctx) {
  const std::size_t n = re.size();
  if (!is_pow2(n)) throw DomainError("fft_radix2_q15: size must be a power of two >= 2");
  if (im.size() != n) throw DomainError("fft_radix2_q15: re/im size mismatch");
  bit_reverse_permute(re);
  bit_reverse_permute(im);

  std::vector<std::int16_t> wr(n / 2), wi(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double th = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
    wr[j] = static_cast<std::int16_t>(std::llround(std::cos(th) * 32767.0));
    wi[j] = static_cast<std::int16_t>(std::llround(-std::sin(th) * 32767.0));
  }

  auto qmul = [](std::int32_t a, std::int32_t b) {
    return static_cast<std::int32_t>((static_cast<std::int64_t>(a) * b + (1 << 14)) >> 15);
  };

  for (std::size_t m = 2; m <= n; m <<= 1) {
    const std::size_t step = n / m;
    for (std::size_t k = 0; k < n; k += m) {
      for (std::size_t j = 0; j < m / 2; ++j) {
        const std::size_t wj = j * step;
        const std::size_t a = k + j, b = k + j + m / 2;
        const std::int32_t tr = qmul(re[b], wr[wj]) - qmul(im[b], wi[wj]);
        const std::int32_t ti = qmul(re[b], wi[wj]) + qmul(im[b], wr[wj]);
        // stage halving keeps the working range inside q15
        re[b] = sat16((re[a] - tr) >> 1);
        im[b] = sat16((im[a] - ti) >> 1);
        re[a] = sat16((re[a] + tr) >> 1);
        im[a] = sat16((im[a] + ti) >> 1);
      }
    }
  }
  const int stages = log2_size(n);
  const auto st = static_cast<std::uint64_t>(stages);
  ctx.mul_fxp(2 * n * st);
  ctx.mac_fxp(n * st);
  ctx.mem(2 * n * st);
  return stages;
}

std::vector<std::complex<double>> q15_spectrum_to_complex(
    std::span<const std::int16_t> re, std::span<const std::int16_t> im,
    int stages) {
  if (re.size() != im.size())
    throw DomainError("q15_spectrum_to_complex: size mismatch");
  const double scale = std::ldexp(1.0, stages) / 32768.0;
  std::vector<std::complex<double>> out(re.size());
  for (std::size_t i = 0; i < re.size(); ++i)
    out[i] = {re[i] * scale, im[i] * scale};
  return out;
}

PowerSpectrum periodogram(std::span<const double> x, double fs,
                          KernelContext& ctx) {
  if (x.empty()) throw DomainError("periodogram: empty input");
  if (!(fs > 0)) throw DomainError("periodogram: fs must be positive");
  std::size_t n_fft = 2;
  while (n_fft < x.size()) n_fft <<= 1;

  std::vector<std::complex<double>> buf(n_fft);
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
  fft_radix2(buf, ctx);

  PowerSpectrum ps;
  ps.fs = fs;
  ps.n_fft = n_fft;
  ps.psd.resize(n_fft / 2 + 1);
  const double norm = 1.0 / (static_cast<double>(n_fft) * fs);
  for (std::size_t k = 0; k <= n_fft / 2; ++k) {
    double p = std::norm(buf[k]) * norm;
    if (k != 0 && k != n_fft / 2) p *= 2.0;
    ps.psd[k] = p;
  }
  ctx.mul(3 * (n_fft / 2 + 1));
  ctx.mem(n_fft / 2 + 1);
  return ps;
}

double band_power(const PowerSpectrum& ps, double lo_hz, double hi_hz,
                  KernelContext& ctx) {
  if (!(lo_hz >= 0) || !(hi_hz > lo_hz) || hi_hz > ps.fs / 2 + 1e-9)
    throw DomainError("band_power: bad band edges");
  const double df = ps.bin_hz();
  double sum = 0;
  std::uint64_t bins = 0;
  for (std::size_t k = 0; k < ps.psd.size(); ++k) {
    const double f = df * static_cast<double>(k);
    if (f >= lo_hz && f < hi_hz) {
      sum += ps.psd[k];
      ++bins;
    }
  }
  ctx.mac(bins);
  ctx.branch(ps.psd.size());
  ctx.mul(1);
  return sum * df;
}

double spectral_entropy(const PowerSpectrum& ps, KernelContext& ctx) {
  const double total = std::accumulate(ps.psd.begin(), ps.psd.end(), 0.0);
  ctx.mac(ps.psd.size());
  if (total <= 0) return 0.0;
  double h = 0;
  for (double p : ps.psd) {
    if (p <= 0) continue;
    const double q = p / total;
    h -= q * std::log(q);
  }
  ctx.mul(4 * ps.psd.size());
  ctx.mac(ps.psd.size());
  return h / std::log(static_cast<double>(ps.psd.size()));
}

double peak_frequency(const PowerSpectrum& ps, KernelContext& ctx) {
  const auto it = std::max_element(ps.psd.begin(), ps.psd.end());
  ctx.branch(ps.psd.size());
  return ps.bin_hz() * static_cast<double>(std::distance(ps.psd.begin(), it));
}

std::vector<double> lomb_scargle(std::span<const double> t,
                                 std::span<const double> x,
                                 std::span<const double> freqs_hz,
                                 KernelContext& ctx) {
  const std::size_t n = t.size();
  if (n < 2) throw DomainError("lomb_scargle: need at least two samples");
  if (x.size() != n) throw DomainError("lomb_scargle: t/x size mismatch");
  for (std::size_t i = 1; i < n; ++i)
    if (!(t[i] > t[i - 1]))
      throw DomainError("lomb_scargle: times must be strictly increasing");
  for (double f : freqs_hz)
    if (!(f > 0)) throw DomainError("lomb_scargle: frequencies must be positive");

  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  std::vector<double> xc(n);
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xc[i] = x[i] - mean;
    ss += xc[i] * xc[i];
  }
  const double var = ss / static_cast<double>(n - 1);

  std::vector<double> power(freqs_hz.size(), 0.0);
  if (var <= 0) {
    ctx.mac(3 * n);
    return power;
  }

  for (std::size_t fi = 0; fi < freqs_hz.size(); ++fi) {
    const double w = 2.0 * M_PI * freqs_hz[fi];
    double s2 = 0, c2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s2 += std::sin(2.0 * w * t[i]);
      c2 += std::cos(2.0 * w * t[i]);
    }
    const double tau = std::atan2(s2, c2) / (2.0 * w);

    double xcos = 0, xsin = 0, cc = 0, ssn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double arg = w * (t[i] - tau);
      const double c = std::cos(arg), s = std::sin(arg);
      xcos += xc[i] * c;
      xsin += xc[i] * s;
      cc += c * c;
      ssn += s * s;
    }
    double p = 0;
    if (cc > 1e-300) p += xcos * xcos / cc;
    if (ssn > 1e-300) p += xsin * xsin / ssn;
    power[fi] = p / (2.0 * var);
  }
  const std::uint64_t pairs = n * freqs_hz.size();
  ctx.mul(14 * pairs);
  ctx.mac(6 * pairs);
  ctx.mem(2 * pairs);
  return power;
}

}  // namespace biobench::dsp
