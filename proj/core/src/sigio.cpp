#include "biobench/sigio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "biobench/rng.hpp"

namespace biobench::sigio {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::size_t samples_for_window(const SignalSpec& spec, double window_seconds) {
  if (!(window_seconds > 0)) throw DomainError("window_seconds must be positive");
  const double exact = static_cast<double>(spec.sample_rate_hz) * window_seconds;
  const auto n = static_cast<std::size_t>(std::llround(exact));
  if (n == 0 || std::fabs(exact - static_cast<double>(n)) > 1e-6)
    throw DomainError("window_seconds x sample_rate must be a whole sample count");
  return n;
}

void format_value(std::string& out, double v) {
  char buf[40];
  if (v == std::floor(v) && std::fabs(v) < 9.0e15) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  out += buf;
}

}  // namespace

void SignalSpec::validate() const {
  if (sample_rate_hz < 1) throw DomainError("SignalSpec: sample_rate must be >= 1 Hz");
  if (bits_per_sample != 16 && bits_per_sample != 24 && bits_per_sample != 32)
    throw DomainError("SignalSpec: bits_per_sample must be 16, 24, or 32");
  if (channels < 1) throw DomainError("SignalSpec: channels must be >= 1");
}

SampleBuffer::SampleBuffer(SignalSpec spec, double window_seconds)
    : spec_(std::move(spec)), window_seconds_(window_seconds) {
  spec_.validate();
  n_ = samples_for_window(spec_, window_seconds);
  data_.assign(static_cast<std::size_t>(spec_.channels) * n_, 0.0);
}

double input_bandwidth(std::span<const SignalSpec> specs) {
  if (specs.empty()) throw DomainError("input_bandwidth: empty spec list");
  double total = 0;
  for (const auto& s : specs) {
    s.validate();
    total += static_cast<double>(s.sample_rate_hz) * s.bytes_per_sample() * s.channels;
  }
  return total;
}

AcquisitionSchedule schedule_acquisition(std::span<const SignalSpec> specs,
                                         double window_seconds,
                                         std::uint32_t buffer_bytes) {
  if (buffer_bytes == 0) throw DomainError("schedule_acquisition: zero buffer");
  if (!(window_seconds > 0)) throw DomainError("schedule_acquisition: window must be positive");
  const double bw = input_bandwidth(specs);
  const double window_bytes = bw * window_seconds;

  AcquisitionSchedule sched;
  sched.buffer_bytes = buffer_bytes;
  sched.batch_period_s = std::min(buffer_bytes / bw, window_seconds);
  sched.batches_per_window = static_cast<std::uint32_t>(
      std::ceil(window_bytes / buffer_bytes - 1e-9));
  if (sched.batches_per_window == 0) sched.batches_per_window = 1;
  return sched;
}

SampleBuffer generate_synthetic(const SignalSpec& spec, SyntheticKind kind,
                                const SyntheticParams& params,
                                double window_seconds, std::uint64_t seed) {
  spec.validate();
  if (!std::isfinite(params.amplitude) || !std::isfinite(params.frequency_hz) ||
      !std::isfinite(params.offset) || !std::isfinite(params.noise_amplitude) ||
      !std::isfinite(params.beats_per_minute))
    throw DomainError("generate_synthetic: non-finite parameter");

  double peak = std::fabs(params.offset);
  switch (kind) {
    case SyntheticKind::sine: peak += std::fabs(params.amplitude); break;
    case SyntheticKind::sine_plus_noise:
      peak += std::fabs(params.amplitude) + std::fabs(params.noise_amplitude);
      break;
    case SyntheticKind::ecg_like:
      // template overshoot margin of 1.2 covers the biphasic lobes
      peak += 1.2 * std::fabs(params.amplitude) + std::fabs(params.noise_amplitude);
      break;
    case SyntheticKind::constant: break;
  }
  if (peak > static_cast<double>(spec.max_code()))
    throw DomainError("generate_synthetic: amplitude exceeds representable range");

  SampleBuffer buf(spec, window_seconds);
  const double fs = spec.sample_rate_hz;
  Rng rng(seed);

  for (std::size_t ch = 0; ch < buf.channels(); ++ch) {
    auto out = buf.channel(ch);
    switch (kind) {
      case SyntheticKind::constant:
        for (auto& v : out) v = std::nearbyint(params.offset);
        break;
      case SyntheticKind::sine:
      case SyntheticKind::sine_plus_noise:
        for (std::size_t i = 0; i < out.size(); ++i) {
          double v = params.offset +
                     params.amplitude * std::sin(2.0 * kPi * params.frequency_hz * i / fs);
          if (kind == SyntheticKind::sine_plus_noise)
            v += params.noise_amplitude * (2.0 * rng.uniform() - 1.0);
          out[i] = std::nearbyint(v);
        }
        break;
      case SyntheticKind::ecg_like: {
        // spike train: sharp positive lobe with two shallow side lobes
        const double period = 60.0 / params.beats_per_minute;
        for (std::size_t i = 0; i < out.size(); ++i)
          out[i] = params.offset;
        for (double tb = 0.3; tb < window_seconds; tb += period) {
          const auto lo = static_cast<std::int64_t>((tb - 0.1) * fs);
          const auto hi = static_cast<std::int64_t>((tb + 0.1) * fs);
          for (std::int64_t i = std::max<std::int64_t>(lo, 0);
               i <= std::min<std::int64_t>(hi, static_cast<std::int64_t>(out.size()) - 1);
               ++i) {
            const double dt = i / fs - tb;
            double v = std::exp(-(dt * dt) / (2 * 0.008 * 0.008));
            v -= 0.2 * std::exp(-std::pow((dt - 0.025) / 0.012, 2.0) / 2);
            v -= 0.2 * std::exp(-std::pow((dt + 0.025) / 0.012, 2.0) / 2);
            out[i] += params.amplitude * v;
          }
        }
        if (params.noise_amplitude != 0)
          for (auto& v : out) v += params.noise_amplitude * (2.0 * rng.uniform() - 1.0);
        for (auto& v : out) v = std::nearbyint(v);
        break;
      }
    }
  }
  return buf;
}

void store_signal(const SampleBuffer& buffer, const std::filesystem::path& path,
                  FileFormat format) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("store_signal: cannot open " + path.string());

  const std::size_t n = buffer.window_samples();
  const std::size_t c = buffer.channels();

  if (format == FileFormat::csv) {
    std::string line = "t";
    for (std::size_t ch = 0; ch < c; ++ch) line += ",ch" + std::to_string(ch);
    line += "\n";
    f << line;
    const double fs = buffer.spec().sample_rate_hz;
    for (std::size_t i = 0; i < n; ++i) {
      line.clear();
      char tbuf[32];
      std::snprintf(tbuf, sizeof tbuf, "%.10g", i / fs);
      line += tbuf;
      for (std::size_t ch = 0; ch < c; ++ch) {
        line += ',';
        format_value(line, buffer.at(ch, i));
      }
      line += '\n';
      f << line;
    }
    return;
  }

  const int cb = buffer.spec().container_bytes();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double v = buffer.at(ch, i);
      if (v != std::floor(v))
        throw FormatError("store_signal: raw_le requires integer sample values");
      const auto code = static_cast<std::int64_t>(v);
      const std::int64_t hi = (std::int64_t{1} << (8 * cb - 1)) - 1;
      if (code > hi || code < -hi - 1)
        throw FormatError("store_signal: sample exceeds container range");
      unsigned char bytes[4];
      for (int b = 0; b < cb; ++b)
        bytes[b] = static_cast<unsigned char>((static_cast<std::uint64_t>(code) >> (8 * b)) & 0xFF);
      f.write(reinterpret_cast<const char*>(bytes), cb);
    }
  }
}

namespace {

SampleBuffer load_csv(std::istream& f, const SignalSpec& spec,
                      std::optional<double> expected_window_seconds,
                      const std::string& name) {
  std::string header;
  if (!std::getline(f, header)) throw FormatError("load_signal: empty file " + name);
  std::size_t cols = 1;
  for (char ch : header)
    if (ch == ',') ++cols;
  if (cols != spec.channels + 1)
    throw FormatError("load_signal: expected " + std::to_string(spec.channels) +
                      " channel columns in " + name);

  std::vector<std::vector<double>> channels(spec.channels);
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::size_t pos = 0, col = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      if (col > 0) {
        if (col > spec.channels)
          throw FormatError("load_signal: too many columns in " + name);
        const std::string cell = line.substr(pos, comma - pos);
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) throw FormatError("load_signal: bad number in " + name);
        channels[col - 1].push_back(v);
      }
      ++col;
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    if (col != spec.channels + 1)
      throw FormatError("load_signal: truncated row in " + name);
  }

  const std::size_t n = channels[0].size();
  if (n == 0) throw FormatError("load_signal: no samples in " + name);

  const double window = expected_window_seconds
                            ? *expected_window_seconds
                            : n / static_cast<double>(spec.sample_rate_hz);
  SampleBuffer buf(spec, window);
  if (buf.window_samples() != n)
    throw FormatError("load_signal: length mismatch in " + name + " (got " +
                      std::to_string(n) + " samples, expected " +
                      std::to_string(buf.window_samples()) + ")");
  for (std::size_t ch = 0; ch < spec.channels; ++ch)
    std::copy(channels[ch].begin(), channels[ch].end(), buf.channel(ch).begin());
  return buf;
}

SampleBuffer load_raw(std::istream& f, const SignalSpec& spec,
                      std::optional<double> expected_window_seconds,
                      const std::string& name) {
  std::vector<char> bytes((std::istreambuf_iterator<char>(f)),
                          std::istreambuf_iterator<char>());
  const int cb = spec.container_bytes();
  const std::size_t frame = static_cast<std::size_t>(cb) * spec.channels;
  if (bytes.empty() || bytes.size() % frame != 0)
    throw FormatError("load_signal: truncated raw file " + name);
  const std::size_t n = bytes.size() / frame;

  const double window = expected_window_seconds
                            ? *expected_window_seconds
                            : n / static_cast<double>(spec.sample_rate_hz);
  SampleBuffer buf(spec, window);
  if (buf.window_samples() != n)
    throw FormatError("load_signal: length mismatch in " + name);

  std::size_t off = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ch = 0; ch < spec.channels; ++ch) {
      std::uint64_t u = 0;
      for (int b = 0; b < cb; ++b)
        u |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[off + b])) << (8 * b);
      std::int64_t v = static_cast<std::int64_t>(u);
      const std::int64_t sign_bit = std::int64_t{1} << (8 * cb - 1);
      if (v & sign_bit) v -= sign_bit << 1;
      buf.at(ch, i) = static_cast<double>(v);
      off += cb;
    }
  }
  return buf;
}

}  // namespace

SampleBuffer load_signal(const std::filesystem::path& path, FileFormat format,
                         const SignalSpec& spec,
                         std::optional<double> expected_window_seconds) {
  spec.validate();
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("load_signal: cannot open " + path.string());
  return format == FileFormat::csv
             ? load_csv(f, spec, expected_window_seconds, path.string())
             : load_raw(f, spec, expected_window_seconds, path.string());
}

}  // namespace biobench::sigio
