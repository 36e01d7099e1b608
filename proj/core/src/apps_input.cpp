#include <cmath>

#include "biobench/apps.hpp"
#include "biobench/rng.hpp"

namespace biobench::apps {

namespace {

constexpr double kPi = 3.14159265358979323846;

sigio::SyntheticParams ecg_params(double amplitude, double noise) {
  sigio::SyntheticParams p;
  p.amplitude = amplitude;
  p.noise_amplitude = noise;
  p.beats_per_minute = 60.0;
  return p;
}

sigio::SyntheticParams tone_params(double amplitude, double freq, double noise,
                                   double offset = 0) {
  sigio::SyntheticParams p;
  p.amplitude = amplitude;
  p.frequency_hz = freq;
  p.noise_amplitude = noise;
  p.offset = offset;
  return p;
}

// Sixteen electrodes observing four latent sources through a random mixing
// matrix: a 50 Hz tone, a 35 Hz square, a 20 Hz sawtooth, and uniform
// noise.  Electrode noise rides on top; codes stay well inside 24 bits.
sigio::SampleBuffer mixed_semg(const sigio::SignalSpec& spec,
                               double window_seconds, std::uint64_t seed) {
  sigio::SampleBuffer buf(spec, window_seconds);
  const std::size_t n = buf.window_samples();
  const std::size_t ch = buf.channels();
  const double fs = spec.sample_rate_hz;
  Rng rng(seed);

  std::vector<double> mix(ch * 4);
  for (auto& a : mix) a = rng.uniform(-1.0, 1.0);

  std::vector<double> src(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    src[0 * n + i] = std::sin(2 * kPi * 50.0 * t);
    src[1 * n + i] = std::sin(2 * kPi * 35.0 * t) >= 0 ? 1.0 : -1.0;
    src[2 * n + i] = 2.0 * (20.0 * t - std::floor(20.0 * t)) - 1.0;
    src[3 * n + i] = rng.uniform(-1.0, 1.0);
  }

  const double scale = 5e5;
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0;
      for (std::size_t k = 0; k < 4; ++k) v += mix[c * 4 + k] * src[k * n + i];
      v = scale * v + 1e3 * rng.uniform(-1.0, 1.0);
      buf.at(c, i) = std::nearbyint(v);
    }
  return buf;
}

}  // namespace

WindowInput synthesize_input(const AppConfig& config, std::uint64_t seed) {
  config.validate();
  WindowInput w;
  if (config.app == AppId::BPfree) return w;  // training data ships with the model

  const double W = config.window_seconds;
  using sigio::SyntheticKind;
  for (std::size_t i = 0; i < config.specs.size(); ++i) {
    const auto& s = config.specs[i];
    const std::uint64_t sub_seed = seed + 1000 * i;
    switch (config.app) {
      case AppId::HCL:
      case AppId::SeizDetSVM:
        w.buffers.push_back(sigio::generate_synthetic(
            s, SyntheticKind::ecg_like, ecg_params(1000, 20), W, sub_seed));
        break;
      case AppId::SeizDetCNN:
        w.buffers.push_back(sigio::generate_synthetic(
            s, SyntheticKind::sine_plus_noise, tone_params(3000, 10, 800), W,
            sub_seed));
        break;
      case AppId::CWM:
        w.buffers.push_back(sigio::generate_synthetic(
            s, SyntheticKind::sine_plus_noise, tone_params(1e5, 10, 2e4), W,
            sub_seed));
        break;
      case AppId::GCL:
        w.buffers.push_back(mixed_semg(s, W, sub_seed));
        break;
      case AppId::CoughDet:
        if (s.name == "audio")
          w.buffers.push_back(sigio::generate_synthetic(
              s, SyntheticKind::sine_plus_noise, tone_params(2e6, 440, 5e5), W,
              sub_seed));
        else
          w.buffers.push_back(sigio::generate_synthetic(
              s, SyntheticKind::sine_plus_noise, tone_params(2000, 5, 300), W,
              sub_seed));
        break;
      case AppId::ECL:
        if (s.name == "ppg")
          w.buffers.push_back(sigio::generate_synthetic(
              s, SyntheticKind::sine_plus_noise, tone_params(1e6, 1.2, 1e4, 2e6),
              W, sub_seed));
        else if (s.name == "gsr")
          w.buffers.push_back(sigio::generate_synthetic(
              s, SyntheticKind::sine_plus_noise, tone_params(1e4, 0.1, 1e3, 5e5),
              W, sub_seed));
        else {
          sigio::SyntheticParams p;
          p.offset = 3300;  // skin temperature, centidegrees
          w.buffers.push_back(sigio::generate_synthetic(
              s, SyntheticKind::constant, p, W, sub_seed));
        }
        break;
      case AppId::BPfree:
        break;
    }
  }
  return w;
}

WindowInput load_input_dir(const AppConfig& config,
                           const std::filesystem::path& dir) {
  config.validate();
  WindowInput w;
  for (const auto& s : config.specs) {
    const auto path = dir / (s.name + ".csv");
    w.buffers.push_back(sigio::load_signal(path, sigio::FileFormat::csv, s,
                                           config.window_seconds));
  }
  return w;
}

}  // namespace biobench::apps
