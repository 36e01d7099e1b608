#ifndef BIOBENCH_REPORT_HPP
#define BIOBENCH_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biobench/apps.hpp"
#include "biobench/counters.hpp"
#include "biobench/phasesim.hpp"
#include "biobench/power.hpp"

/// Report assembly behind the command-line front end: run one app and fold
/// the classification, metrics, counters, and phase timeline into a single
/// serializable record.  Rendering is deterministic; identical inputs give
/// byte-identical output in every format.
namespace biobench::report {

inline constexpr int kSchemaVersion = 1;

/// Numbers lifted from the shipped calibration tables were measured on real
/// boards; everything this harness computes is labeled desk-computed so the
/// two are never conflated downstream.
inline constexpr const char* kProvenanceMeasured = "measured";
inline constexpr const char* kProvenanceDesk = "desk-computed";

/// Condensed phase timeline for one acquisition window.
struct TimelineSummary {
  double window_seconds = 0;
  double idle_seconds = 0;
  double acquisition_seconds = 0;
  double processing_seconds = 0;
  std::size_t segments = 0;

  bool operator==(const TimelineSummary&) const = default;
};

TimelineSummary summarize(const phasesim::PhaseTimeline& timeline);

struct RunReport {
  int schema_version = kSchemaVersion;
  std::string app_id;
  std::string config_hash;  ///< stable across identical configs
  std::uint64_t seed = 0;
  std::string input_source;  ///< "synthetic" or the fixture directory
  apps::ClassificationResult classification;
  apps::AppMetrics metrics;
  /// Absent for apps without acquisition and when the processing budget
  /// overruns the window (the violation flag in metrics covers that case).
  std::optional<TimelineSummary> timeline;
  /// The measured cycle budget and clock the duty simulation used; absent
  /// when no reference was available.
  std::optional<apps::DutyReference> duty_reference;
  OpCounters counters;
  /// Populated only on request; wall time varies between invocations and
  /// would break byte-for-byte determinism of the report.
  std::optional<double> wall_seconds;
};

/// FNV-1a 64 over the canonical config serialization, rendered as
/// "fnv1a64:" plus sixteen hex digits.
std::string config_hash(const apps::AppConfig& config);

struct RunOptions {
  std::uint64_t seed = 1;
  /// Synthetic input when absent, fixtures/<app>/<signal>.csv otherwise.
  std::optional<std::filesystem::path> input_dir;
  /// Processing budget for the duty simulation.  mcycles <= 0 means no
  /// reference is available: duty fields are dropped and a note added.
  apps::DutyReference duty;
  bool timing = false;
  /// Optional sink for the full phase timeline as CSV.
  std::optional<std::filesystem::path> timeline_csv;
};

RunReport run_app(const apps::AppConfig& config, const RunOptions& options);

/// Metrics row for one app from a synthetic run with the given seed.
/// Shares run_app's no-reference handling for the duty fields.
apps::AppMetrics characterize_app(const apps::AppConfig& config,
                                  std::uint64_t seed,
                                  const apps::DutyReference& duty);

enum class Format { json, csv, text };

/// Case-insensitive; unknown names throw ConfigError.
Format parse_format(std::string_view name);

std::string render(const RunReport& report, Format fmt);

/// Characterization table, one row per app.
std::string render_metrics(std::span<const apps::AppMetrics> rows, Format fmt);

/// Per-app platform ranking joined with the phase-share breakdown.
struct ComparisonReport {
  AppId app = AppId::HCL;
  power::PlatformComparison comparison;
  std::vector<power::PhaseShares> breakdown;
};

ComparisonReport compare_app(std::span<const power::PlatformEnergyRecord> records,
                             AppId app);

std::string render_comparisons(std::span<const ComparisonReport> rows,
                               Format fmt);

}  // namespace biobench::report

#endif  // BIOBENCH_REPORT_HPP
