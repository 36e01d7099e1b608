#include <fstream>
#include <sstream>

#include <json.hpp>

#include "biobench/apps.hpp"

namespace biobench::apps {

namespace {

using nlohmann::json;

bool known_arithmetic(const std::string& a) {
  return a == "fxp16" || a == "fxp32" || a == "fp32";
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

json params_to_json(const PipelineParams& p) {
  json j;
  j["morph_kernel"] = p.morph_kernel;
  j["relen_short_s"] = p.relen_short_s;
  j["relen_long_s"] = p.relen_long_s;
  j["peak_threshold"] = p.peak_threshold;
  j["refractory_s"] = p.refractory_s;
  j["ma_window"] = p.ma_window;
  j["lpc_order"] = p.lpc_order;
  j["lomb_n_freqs"] = p.lomb_n_freqs;
  j["lomb_max_hz"] = p.lomb_max_hz;
  j["detrend_window"] = p.detrend_window;
  j["chunk_seconds"] = p.chunk_seconds;
  j["mfcc_frame"] = p.mfcc_frame;
  j["mfcc_mels"] = p.mfcc_mels;
  j["mfcc_coeffs"] = p.mfcc_coeffs;
  j["ica_components"] = p.ica_components;
  j["ica_max_iterations"] = p.ica_max_iterations;
  j["ica_tolerance"] = p.ica_tolerance;
  j["knn_train_points"] = p.knn_train_points;
  j["batch_seconds"] = p.batch_seconds;
  j["bpfree_margin"] = p.bpfree_margin;
  j["bpfree_learning_rate"] = p.bpfree_learning_rate;
  j["bpfree_epochs"] = p.bpfree_epochs;
  return j;
}

PipelineParams params_from_json(const json& j) {
  PipelineParams p;
  j.at("morph_kernel").get_to(p.morph_kernel);
  j.at("relen_short_s").get_to(p.relen_short_s);
  j.at("relen_long_s").get_to(p.relen_long_s);
  j.at("peak_threshold").get_to(p.peak_threshold);
  j.at("refractory_s").get_to(p.refractory_s);
  j.at("ma_window").get_to(p.ma_window);
  j.at("lpc_order").get_to(p.lpc_order);
  j.at("lomb_n_freqs").get_to(p.lomb_n_freqs);
  j.at("lomb_max_hz").get_to(p.lomb_max_hz);
  j.at("detrend_window").get_to(p.detrend_window);
  j.at("chunk_seconds").get_to(p.chunk_seconds);
  j.at("mfcc_frame").get_to(p.mfcc_frame);
  j.at("mfcc_mels").get_to(p.mfcc_mels);
  j.at("mfcc_coeffs").get_to(p.mfcc_coeffs);
  j.at("ica_components").get_to(p.ica_components);
  j.at("ica_max_iterations").get_to(p.ica_max_iterations);
  j.at("ica_tolerance").get_to(p.ica_tolerance);
  j.at("knn_train_points").get_to(p.knn_train_points);
  j.at("batch_seconds").get_to(p.batch_seconds);
  j.at("bpfree_margin").get_to(p.bpfree_margin);
  j.at("bpfree_learning_rate").get_to(p.bpfree_learning_rate);
  j.at("bpfree_epochs").get_to(p.bpfree_epochs);
  return p;
}

sigio::SignalSpec spec(std::string name, std::uint32_t rate, int bits,
                       std::uint32_t channels) {
  sigio::SignalSpec s;
  s.name = std::move(name);
  s.sample_rate_hz = rate;
  s.bits_per_sample = bits;
  s.channels = channels;
  return s;
}

}  // namespace

void AppConfig::validate() const {
  if (!known_arithmetic(arithmetic))
    throw ConfigError("arithmetic must be fxp16, fxp32 or fp32, got '" +
                      arithmetic + "'");
  if (app == AppId::BPfree) {
    if (!specs.empty() || window_seconds != 0)
      throw ConfigError("the trainer takes no live acquisition: specs must "
                        "be empty and window_seconds 0");
  } else {
    if (specs.empty())
      throw ConfigError(to_string(app) + " needs at least one signal");
    if (!(window_seconds > 0))
      throw ConfigError("window_seconds must be positive");
    if (buffer_bytes == 0) throw ConfigError("buffer_bytes must be positive");
  }
  for (const auto& s : specs) s.validate();

  const PipelineParams& p = params;
  if (p.morph_kernel < 1 || p.morph_kernel % 2 == 0)
    throw ConfigError("morph_kernel must be odd and positive");
  if (!(p.relen_short_s > 0) || !(p.relen_long_s >= p.relen_short_s))
    throw ConfigError("relative-energy windows must satisfy 0 < short <= long");
  if (!(p.refractory_s >= 0)) throw ConfigError("refractory_s must be >= 0");
  if (p.ma_window < 1) throw ConfigError("ma_window must be positive");
  if (p.lpc_order < 1) throw ConfigError("lpc_order must be positive");
  if (p.lomb_n_freqs < 1 || !(p.lomb_max_hz > 0))
    throw ConfigError("Lomb grid needs positive size and max frequency");
  if (p.detrend_window < 1) throw ConfigError("detrend_window must be positive");
  if (!(p.chunk_seconds > 0)) throw ConfigError("chunk_seconds must be positive");
  if (!is_pow2(p.mfcc_frame)) throw ConfigError("mfcc_frame must be a power of two");
  if (p.mfcc_mels < 1 || p.mfcc_coeffs < 1 || p.mfcc_coeffs > p.mfcc_mels)
    throw ConfigError("mfcc_coeffs must be in [1, mfcc_mels]");
  if (p.ica_components < 1 || p.ica_max_iterations < 1 || !(p.ica_tolerance > 0))
    throw ConfigError("ICA parameters out of range");
  if (p.knn_train_points < 1) throw ConfigError("knn_train_points must be positive");
  if (!(p.batch_seconds > 0)) throw ConfigError("batch_seconds must be positive");
  if (!(p.bpfree_margin > 0) || !(p.bpfree_learning_rate > 0) ||
      p.bpfree_epochs < 1)
    throw ConfigError("trainer parameters out of range");
}

AppConfig default_config(AppId app) {
  AppConfig c;
  c.app = app;
  switch (app) {
    case AppId::HCL:
      c.specs = {spec("ecg", 256, 16, 3)};
      c.window_seconds = 15;
      c.arithmetic = "fxp16";
      break;
    case AppId::SeizDetSVM:
      c.specs = {spec("ecg", 64, 16, 1)};
      c.window_seconds = 60;
      c.arithmetic = "fxp32";
      break;
    case AppId::SeizDetCNN:
      c.specs = {spec("eeg", 256, 16, 23)};
      c.window_seconds = 4;
      c.arithmetic = "fxp16";
      break;
    case AppId::CWM:
      c.specs = {spec("eeg", 256, 32, 4)};
      c.window_seconds = 56;
      c.arithmetic = "fxp32";
      break;
    case AppId::GCL:
      c.specs = {spec("semg", 4000, 24, 16)};
      c.window_seconds = 0.2;
      c.arithmetic = "fp32";
      break;
    case AppId::CoughDet:
      c.specs = {spec("audio", 16000, 32, 1), spec("imu", 100, 16, 6)};
      c.window_seconds = 0.3;
      c.arithmetic = "fp32";
      break;
    case AppId::ECL:
      c.specs = {spec("ppg", 200, 32, 1), spec("gsr", 5, 32, 1),
                 spec("skin_temperature", 1, 16, 1)};
      c.window_seconds = 10;
      c.arithmetic = "fp32";
      break;
    case AppId::BPfree:
      c.window_seconds = 0;
      c.arithmetic = "fp32";
      break;
  }
  return c;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("config " + path.string() + ": " + e.what());
  }
  AppConfig c;
  try {
    c.app = parse_app_id(j.at("app").get<std::string>());
    c.window_seconds = j.at("window_seconds").get<double>();
    c.arithmetic = j.at("arithmetic").get<std::string>();
    c.buffer_bytes = j.at("buffer_bytes").get<std::uint32_t>();
    c.model_seed = j.at("model_seed").get<std::uint64_t>();
    c.model_path = j.value("model_path", std::string{});
    for (const auto& js : j.at("signals")) {
      sigio::SignalSpec s;
      s.name = js.at("name").get<std::string>();
      s.sample_rate_hz = js.at("sample_rate_hz").get<std::uint32_t>();
      s.bits_per_sample = js.at("bits_per_sample").get<int>();
      s.channels = js.at("channels").get<std::uint32_t>();
      c.specs.push_back(std::move(s));
    }
    if (j.contains("params")) c.params = params_from_json(j.at("params"));
  } catch (const json::exception& e) {
    throw FormatError("config " + path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

std::string to_canonical_json(const AppConfig& config) {
  json j;
  j["app"] = to_string(config.app);
  j["window_seconds"] = config.window_seconds;
  j["arithmetic"] = config.arithmetic;
  j["buffer_bytes"] = config.buffer_bytes;
  j["model_seed"] = config.model_seed;
  j["model_path"] = config.model_path;
  j["signals"] = json::array();
  for (const auto& s : config.specs) {
    json js;
    js["name"] = s.name;
    js["sample_rate_hz"] = s.sample_rate_hz;
    js["bits_per_sample"] = s.bits_per_sample;
    js["channels"] = s.channels;
    j["signals"].push_back(std::move(js));
  }
  j["params"] = params_to_json(config.params);
  return j.dump(2) + '\n';
}

void store_config(const AppConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write config " + path.string());
  out << to_canonical_json(config);
}

}  // namespace biobench::apps
