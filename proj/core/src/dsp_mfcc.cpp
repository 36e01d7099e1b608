#include <cmath>

#include "biobench/dsp.hpp"

namespace biobench::dsp {

namespace {

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

}  // namespace

std::vector<std::vector<double>> mfcc(std::span<const double> x, double fs,
                                      const MfccParams& params,
                                      KernelContext& ctx) {
  const std::size_t N = params.frame_len;
  if (N < 2 || (N & (N - 1)) != 0)
    throw DomainError("mfcc: frame_len must be a power of two >= 2");
  if (params.n_mels < 2) throw DomainError("mfcc: need at least two mel bands");
  if (params.n_coeffs == 0 || params.n_coeffs > params.n_mels)
    throw DomainError("mfcc: n_coeffs must be in [1, n_mels]");
  if (!(fs > 0)) throw DomainError("mfcc: fs must be positive");
  const double fmax = params.fmax_hz > 0 ? params.fmax_hz : fs / 2;
  if (!(params.fmin_hz >= 0) || !(fmax > params.fmin_hz) || fmax > fs / 2 + 1e-9)
    throw DomainError("mfcc: bad mel band edges");
  const std::size_t frames = x.size() / N;
  if (frames == 0) throw DomainError("mfcc: input shorter than one frame");

  const std::size_t M = params.n_mels;
  const std::size_t nbins = N / 2 + 1;

  // filterbank edge frequencies, equally spaced on the mel scale
  std::vector<double> edges(M + 2);
  const double mlo = hz_to_mel(params.fmin_hz), mhi = hz_to_mel(fmax);
  for (std::size_t m = 0; m < M + 2; ++m)
    edges[m] = mel_to_hz(mlo + (mhi - mlo) * static_cast<double>(m) /
                                   static_cast<double>(M + 1));

  std::vector<double> window(N);
  hann_window_periodic(window);

  std::vector<double> dct_table(M * params.n_coeffs);
  for (std::size_t j = 0; j < params.n_coeffs; ++j)
    for (std::size_t m = 0; m < M; ++m)
      dct_table[j * M + m] = std::cos(
          M_PI * static_cast<double>(j) * (static_cast<double>(m) + 0.5) /
          static_cast<double>(M));

  std::vector<std::vector<double>> out(frames,
                                       std::vector<double>(params.n_coeffs));
  std::vector<std::complex<double>> buf(N);
  std::vector<double> pw(nbins), mel_e(M);

  std::uint64_t filter_taps = 0;
  for (std::size_t fr = 0; fr < frames; ++fr) {
    for (std::size_t i = 0; i < N; ++i) buf[i] = x[fr * N + i] * window[i];
    fft_radix2(buf, ctx);
    for (std::size_t k = 0; k < nbins; ++k)
      pw[k] = std::norm(buf[k]) / static_cast<double>(N);

    for (std::size_t m = 0; m < M; ++m) {
      const double fl = edges[m], fc = edges[m + 1], fr_ = edges[m + 2];
      double e = 0;
      for (std::size_t k = 0; k < nbins; ++k) {
        const double f = fs * static_cast<double>(k) / static_cast<double>(N);
        double wgt = 0;
        if (f > fl && f < fc)
          wgt = (f - fl) / (fc - fl);
        else if (f >= fc && f < fr_)
          wgt = (fr_ - f) / (fr_ - fc);
        if (wgt > 0) {
          e += wgt * pw[k];
          ++filter_taps;
        }
      }
      mel_e[m] = std::log(std::max(e, 1e-10));
    }
    for (std::size_t j = 0; j < params.n_coeffs; ++j) {
      double c = 0;
      for (std::size_t m = 0; m < M; ++m) c += mel_e[m] * dct_table[j * M + m];
      out[fr][j] = c;
    }
  }
  ctx.mul(frames * (N + 3 * nbins + 2 * M));
  ctx.mac(filter_taps + frames * M * params.n_coeffs);
  ctx.mem(frames * (2 * N + M + params.n_coeffs));
  return out;
}

}  // namespace biobench::dsp
