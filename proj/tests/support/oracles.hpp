#ifndef BIOBENCH_TESTS_ORACLES_HPP
#define BIOBENCH_TESTS_ORACLES_HPP

#include <complex>
#include <span>
#include <vector>

// Independent reference implementations the unit tests compare against.
// These favor the most literal formulation (quadratic DFT, brute-force
// window scans, dense linear solves) over anything shared with the library.
namespace oracles {

/// Quadratic-time DFT: X[k] = sum_n x[n] exp(-2 pi i k n / N).
std::vector<std::complex<double>> naive_dft(std::span<const std::complex<double>> x);

/// Index of the largest-magnitude DFT bin in [1, N/2].
std::size_t dft_peak_bin(std::span<const double> x);

/// Brute-force centered sliding min/max with edge replication.
std::vector<double> brute_erode(std::span<const double> x, std::size_t k);
std::vector<double> brute_dilate(std::span<const double> x, std::size_t k);

/// Dense Gaussian-elimination solve (partial pivoting); a is n x n row-major.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b);

/// Least-squares explained sum of squares for x ~ a cos(w t) + b sin(w t),
/// divided by (2 var) with var = sum((x - mean)^2) / (n - 1).  Identical in
/// exact arithmetic to the tau-rotated periodogram form.
double lomb_reference(std::span<const double> t, std::span<const double> x,
                      double freq_hz);

/// Straight-line cepstral pipeline built on the quadratic DFT: periodic
/// Hann, power spectrum / N, triangle mel filterbank on the HTK scale,
/// log floor 1e-10, direct DCT-II.  Shares nothing with the library path.
std::vector<std::vector<double>> reference_mfcc(std::span<const double> x,
                                                double fs, std::size_t frame,
                                                std::size_t n_mels,
                                                std::size_t n_coeffs);

}  // namespace oracles

#endif  // BIOBENCH_TESTS_ORACLES_HPP
