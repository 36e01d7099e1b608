#ifndef BIOBENCH_APPS_HPP
#define BIOBENCH_APPS_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biobench/appid.hpp"
#include "biobench/counters.hpp"
#include "biobench/errors.hpp"
#include "biobench/memory.hpp"
#include "biobench/phasesim.hpp"
#include "biobench/sigio.hpp"

/// The eight benchmark applications assembled from the kernel modules, plus
/// the accounting needed for the five characterization metrics.
namespace biobench::apps {

/// Flat kernel-parameter bag.  Every app reads its own subset; the rest are
/// inert.  Serialized wholesale so configs stay diffable.
struct PipelineParams {
  // heartbeat classifier
  int morph_kernel = 51;
  double relen_short_s = 0.025;
  double relen_long_s = 0.095;
  double peak_threshold = 2.0;
  double refractory_s = 0.2;
  // ECG seizure detector
  int ma_window = 16;
  int lpc_order = 8;
  int lomb_n_freqs = 256;
  double lomb_max_hz = 0.5;
  // cognitive workload monitor
  int detrend_window = 128;
  double chunk_seconds = 4.0;
  // cough detector
  int mfcc_frame = 512;
  int mfcc_mels = 20;
  int mfcc_coeffs = 13;
  // gesture classifier
  int ica_components = 4;
  int ica_max_iterations = 200;
  double ica_tolerance = 1e-6;
  // emotion classifier
  int knn_train_points = 685;
  double batch_seconds = 1.0;
  // on-device trainer; the rate is small because each layer takes a full
  // contrastive step against raw squared distances
  double bpfree_margin = 1.0;
  double bpfree_learning_rate = 0.001;
  int bpfree_epochs = 1;

  bool operator==(const PipelineParams&) const = default;
};

struct AppConfig {
  AppId app = AppId::HCL;
  std::vector<sigio::SignalSpec> specs;
  double window_seconds = 0;  // 0 only for the no-acquisition trainer
  /// "fxp16", "fxp32" or "fp32"; decides how generic kernel arithmetic is
  /// attributed in the counters.
  std::string arithmetic = "fp32";
  std::uint32_t buffer_bytes = 768;
  /// Built-in models are derived deterministically from this seed unless
  /// model_path points at a serialized model.
  std::uint64_t model_seed = 1;
  std::string model_path;
  PipelineParams params;

  void validate() const;
  bool operator==(const AppConfig&) const = default;
};

/// Canonical per-app configuration matching the published signal layouts.
AppConfig default_config(AppId app);

AppConfig load_config(const std::filesystem::path& path);
void store_config(const AppConfig& config, const std::filesystem::path& path);

/// Sorted-key serialization shared by store_config and the report hash.
/// Identical configs yield identical bytes.
std::string to_canonical_json(const AppConfig& config);

/// One acquisition window of input, one buffer per configured sensor.
struct WindowInput {
  std::vector<sigio::SampleBuffer> buffers;
};

/// Deterministic synthetic input shaped for the app (ECG-like beat trains,
/// mixed sEMG sources, and so on).
WindowInput synthesize_input(const AppConfig& config, std::uint64_t seed);

/// Load fixtures/<app>/<signal>.csv for each configured sensor.
WindowInput load_input_dir(const AppConfig& config,
                           const std::filesystem::path& dir);

struct StageStats {
  std::string name;
  OpCounters ops;
};

struct ClassificationResult {
  std::string label;
  double score = 0;
  std::vector<double> values;  ///< app-specific extras (logits, votes, losses)
  std::vector<std::string> notes;
};

class Pipeline {
 public:
  virtual ~Pipeline() = default;

  const AppConfig& config() const { return config_; }

  /// Run one acquisition window.  Resets counters and the dynamic ledger,
  /// then fills both.
  ClassificationResult process_window(const WindowInput& input);

  bool has_run() const { return has_run_; }
  const OpCounters& counters() const;
  std::span<const StageStats> stage_stats() const;
  const MemoryLedger& memory() const { return ledger_; }

 protected:
  explicit Pipeline(AppConfig config);

  virtual ClassificationResult run(const WindowInput& input,
                                   KernelContext& ctx) = 0;

  /// Record everything since the last stage boundary under `name`.  Closing
  /// the same name again (chunked pipelines) accumulates into one entry.
  void close_stage(const std::string& name, KernelContext& ctx);

  AppConfig config_;
  MemoryLedger ledger_;

 private:
  std::vector<StageStats> stages_;
  OpCounters totals_;
  OpCounters stage_mark_;
  bool has_run_ = false;
};

/// Build one of the eight pipelines.  Unknown ids and malformed model files
/// are configuration errors.
std::unique_ptr<Pipeline> build_app(const AppConfig& config);

/// The five characterization metrics for one completed run.
struct AppMetrics {
  AppId app = AppId::HCL;
  OpCategory dominant = OpCategory::branches;
  std::string main_operations;  ///< label text, e.g. "16-bit fxp mac"
  std::optional<double> duty_ratio;
  std::optional<phasesim::DutyBin> duty_bin;
  bool realtime_violation = false;
  std::optional<double> input_bandwidth_bps;
  double static_kib = 0;
  double dynamic_kib = 0;
  std::vector<std::string> notes;
};

/// Processing budget used to time the duty-cycle simulation: cycle count
/// and reference clock (the published minimum cycles at 80 MHz by default).
struct DutyReference {
  double mcycles = 0;
  double clock_hz = 80e6;
};

/// Compute the metrics from the pipeline's last run.  Throws StateError if
/// the pipeline never ran.  Apps without acquisition report no bandwidth or
/// duty; a processing budget that cannot fit the window clamps duty to 1
/// and sets the violation flag instead of throwing.
AppMetrics characterize(const Pipeline& pipeline, const DutyReference& duty);

struct StageShare {
  std::string name;
  double share = 0;  ///< stage compute ops / total compute ops
};

/// Per-stage fraction of compute operations, descending.  Throws StateError
/// when nothing ran or nothing was counted.
std::vector<StageShare> dominant_kernel_share(const Pipeline& pipeline);

}  // namespace biobench::apps

#endif  // BIOBENCH_APPS_HPP
