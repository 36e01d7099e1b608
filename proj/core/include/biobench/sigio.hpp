#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biobench/errors.hpp"

namespace biobench::sigio {

// One sensor: sampling rate, per-sample precision, channel count.
// 24-bit samples travel as 3 bytes on the wire but are stored widened to
// 32-bit containers.
struct SignalSpec {
  std::string name;
  std::uint32_t sample_rate_hz = 0;
  int bits_per_sample = 16;  // one of 16, 24, 32
  std::uint32_t channels = 1;

  int bytes_per_sample() const { return (bits_per_sample + 7) / 8; }
  int container_bytes() const { return bits_per_sample == 16 ? 2 : 4; }
  std::int64_t max_code() const {
    return (std::int64_t{1} << (bits_per_sample - 1)) - 1;
  }
  std::int64_t min_code() const { return -(std::int64_t{1} << (bits_per_sample - 1)); }

  void validate() const;
  bool operator==(const SignalSpec&) const = default;
};

// Channel-major sample matrix covering one acquisition window. Values are
// ADC codes (or derived reals) held as doubles; 32-bit codes are exact.
class SampleBuffer {
 public:
  SampleBuffer(SignalSpec spec, double window_seconds);

  std::size_t channels() const { return spec_.channels; }
  std::size_t window_samples() const { return n_; }
  double window_seconds() const { return window_seconds_; }
  const SignalSpec& spec() const { return spec_; }

  double at(std::size_t ch, std::size_t i) const { return data_[ch * n_ + i]; }
  double& at(std::size_t ch, std::size_t i) { return data_[ch * n_ + i]; }
  std::span<const double> channel(std::size_t ch) const {
    return {data_.data() + ch * n_, n_};
  }
  std::span<double> channel(std::size_t ch) {
    return {data_.data() + ch * n_, n_};
  }

  bool operator==(const SampleBuffer&) const = default;

 private:
  SignalSpec spec_;
  double window_seconds_ = 0;
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Aggregate sensor data rate in bytes per second: sum over specs of
// rate x wire bytes x channels.
double input_bandwidth(std::span<const SignalSpec> specs);

// Batch acquisition through a fixed external ADC buffer (default 768 B).
struct AcquisitionSchedule {
  std::uint32_t buffer_bytes = 768;
  double batch_period_s = 0;
  std::uint32_t batches_per_window = 0;
};

AcquisitionSchedule schedule_acquisition(std::span<const SignalSpec> specs,
                                         double window_seconds,
                                         std::uint32_t buffer_bytes = 768);

enum class SyntheticKind { sine, sine_plus_noise, ecg_like, constant };

struct SyntheticParams {
  double amplitude = 1000.0;
  double frequency_hz = 10.0;
  double offset = 0.0;             // level for kind constant
  double noise_amplitude = 0.0;    // uniform +-amp, sine_plus_noise / ecg_like
  double beats_per_minute = 60.0;  // ecg_like
};

// Deterministic generator (fixed seed, fixed output). Samples are rounded
// to integer ADC codes; amplitudes past the representable range are
// rejected.
SampleBuffer generate_synthetic(const SignalSpec& spec, SyntheticKind kind,
                                const SyntheticParams& params,
                                double window_seconds, std::uint64_t seed);

enum class FileFormat { csv, raw_le };

// CSV: header row `t,ch0,ch1,...`, one row per sample instant.
// raw_le: little-endian interleaved samples at container width.
void store_signal(const SampleBuffer& buffer, const std::filesystem::path& path,
                  FileFormat format);

SampleBuffer load_signal(const std::filesystem::path& path, FileFormat format,
                         const SignalSpec& spec,
                         std::optional<double> expected_window_seconds = {});

}  // namespace biobench::sigio
