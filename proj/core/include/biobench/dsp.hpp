#ifndef BIOBENCH_DSP_HPP
#define BIOBENCH_DSP_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "biobench/counters.hpp"
#include "biobench/errors.hpp"

/// Signal-processing kernels shared by the application pipelines.
///
/// Every kernel takes a KernelContext and tallies its work in bulk before
/// returning.  Multiplies and multiply-accumulates route through the context's
/// arithmetic attribution; transcendental evaluations (sin, cos, log, exp,
/// sqrt, atan2, tanh) are tallied as two multiplies each.  Kernels that are
/// inherently fixed-point (the q15 FFT) tally fxp explicitly.
namespace biobench::dsp {

// ---------------------------------------------------------------- filters --

/// Causal moving average with a growing warmup window.
void moving_average(std::span<const double> x, std::span<double> y,
                    std::size_t window, KernelContext& ctx);

/// Baseline removal: y = x - moving_average(x, window).
void detrend_moving_average(std::span<const double> x, std::span<double> y,
                            std::size_t window, KernelContext& ctx);

/// Sliding-window morphology, centered with edge replication.
/// `k` must be odd and <= 2*n-1.  Implemented with a monotonic deque, so the
/// comparison count depends on the data and lands in the branch tally.
void erode(std::span<const double> x, std::span<double> y, std::size_t k,
           KernelContext& ctx);
void dilate(std::span<const double> x, std::span<double> y, std::size_t k,
            KernelContext& ctx);
void morph_open(std::span<const double> x, std::span<double> y, std::size_t k,
                KernelContext& ctx);
void morph_close(std::span<const double> x, std::span<double> y, std::size_t k,
                 KernelContext& ctx);

/// Drift removal: y = x - close(open(x, k), k).
void morph_baseline(std::span<const double> x, std::span<double> y,
                    std::size_t k, KernelContext& ctx);

/// One second-order IIR stage.  Coefficients are normalized (a0 == 1).
struct BiquadSection {
  double b0 = 0, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;

  /// Triangle stability test on the denominator.
  bool is_stable() const;
};

/// Cascade of biquads evaluated in transposed direct form II.  Filter state
/// persists across process() calls until reset().
class BiquadCascade {
 public:
  /// Throws DomainError if any section is unstable or the cascade is empty.
  explicit BiquadCascade(std::vector<BiquadSection> sections);

  void reset();
  void process(std::span<const double> x, std::span<double> y,
               KernelContext& ctx);

  std::size_t sections() const { return sections_.size(); }

 private:
  std::vector<BiquadSection> sections_;
  std::vector<double> s1_, s2_;
};

// --------------------------------------------------------------- spectral --

/// In-place radix-2 decimation-in-time FFT.  Size must be a power of two >= 2.
void fft_radix2(std::span<std::complex<double>> buf, KernelContext& ctx);

/// Q15 radix-2 FFT with a divide-by-two at every stage to prevent overflow.
/// Products are rounded ((p + 2^14) >> 15); the stage halving truncates.
/// Returns the number of stages (log2 n) so callers can undo the scaling.
int fft_radix2_q15(std::span<std::int16_t> re, std::span<std::int16_t> im,
                   KernelContext& ctx);

/// Undo the q15 FFT scaling: X[k] = (re[k] + i*im[k]) * 2^stages / 32768.
std::vector<std::complex<double>> q15_spectrum_to_complex(
    std::span<const std::int16_t> re, std::span<const std::int16_t> im,
    int stages);

/// One-sided power spectral density, n_fft/2 + 1 bins.
struct PowerSpectrum {
  double fs = 0;
  std::size_t n_fft = 0;
  std::vector<double> psd;

  double bin_hz() const { return fs / static_cast<double>(n_fft); }
};

/// Rectangular-window periodogram.  The input is zero-padded to the next
/// power of two; normalization uses the padded length: psd[k] = |X[k]|^2 /
/// (n_fft * fs), with interior bins doubled for the one-sided form.
PowerSpectrum periodogram(std::span<const double> x, double fs,
                          KernelContext& ctx);

/// Integrated power over [lo_hz, hi_hz): bin sum times bin width.
double band_power(const PowerSpectrum& ps, double lo_hz, double hi_hz,
                  KernelContext& ctx);

/// Shannon entropy of the normalized PSD, scaled to [0, 1].  Zero total
/// power yields zero.
double spectral_entropy(const PowerSpectrum& ps, KernelContext& ctx);

/// Frequency of the largest PSD bin (first on ties).
double peak_frequency(const PowerSpectrum& ps, KernelContext& ctx);

/// Classic normalized Lomb-Scargle periodogram for unevenly sampled series.
/// `t` must be strictly increasing with at least two points; frequencies are
/// in Hz and must be positive.  A constant series yields all zeros.
std::vector<double> lomb_scargle(std::span<const double> t,
                                 std::span<const double> x,
                                 std::span<const double> freqs_hz,
                                 KernelContext& ctx);

// ------------------------------------------------------------------- mfcc --

struct MfccParams {
  std::size_t frame_len = 512;  ///< power of two; frames do not overlap
  std::size_t n_mels = 20;
  std::size_t n_coeffs = 13;
  double fmin_hz = 0;
  double fmax_hz = 0;  ///< 0 means fs/2
};

/// Mel-frequency cepstral coefficients, one row per complete frame.
/// Periodic Hann window, HTK mel scale (2595 log10(1 + f/700)), log floor
/// 1e-10, plain (unnormalized) DCT-II.
std::vector<std::vector<double>> mfcc(std::span<const double> x, double fs,
                                      const MfccParams& params,
                                      KernelContext& ctx);

/// Periodic Hann window coefficients: w[i] = 0.5 (1 - cos(2 pi i / N)).
void hann_window_periodic(std::span<double> w);

// ------------------------------------------------------------------ stats --

/// Time-domain summary of a window.  Moments are population moments; zero
/// variance makes skewness, kurtosis, and the Hjorth ratios zero.
struct StatFeatures {
  double mean = 0;
  double variance = 0;
  double stddev = 0;
  double rms = 0;
  double skewness = 0;
  double kurtosis = 0;
  double zero_cross_rate = 0;  ///< sign changes / (n - 1); sign(0) = +1
  double line_length = 0;      ///< mean absolute first difference
  double hjorth_mobility = 0;
  double hjorth_complexity = 0;
};

/// Requires at least three samples.
StatFeatures stat_features(std::span<const double> x, KernelContext& ctx);

/// Linear prediction coefficients a[1..order] via Levinson-Durbin on the
/// biased autocorrelation.  Throws NumericError when the signal has no
/// energy or the recursion loses positive definiteness.
std::vector<double> lpc(std::span<const double> x, std::size_t order,
                        KernelContext& ctx);

/// Short-over-long relative energy score with causal windows.  Windows warm
/// up from the start of the series; a vanishing long-window energy scores 0.
std::vector<double> relative_energy(std::span<const double> x,
                                    std::size_t w_short, std::size_t w_long,
                                    KernelContext& ctx);

struct PeakParams {
  double threshold = 2.0;
  double refractory_s = 0.2;
};

/// Local maxima of `score` at or above the threshold, greedily thinned so
/// accepted peaks are at least the refractory interval apart (the larger
/// score wins inside the interval).
std::vector<std::size_t> detect_peaks(std::span<const double> score, double fs,
                                      const PeakParams& params,
                                      KernelContext& ctx);

}  // namespace biobench::dsp

#endif  // BIOBENCH_DSP_HPP
