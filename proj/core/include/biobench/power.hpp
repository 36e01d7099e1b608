#ifndef BIOBENCH_POWER_HPP
#define BIOBENCH_POWER_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "biobench/appid.hpp"
#include "biobench/errors.hpp"

/// Platform energy ledger: ingest the measured per-app, per-platform phase
/// energies shipped under data/, check their integrity, and derive
/// breakdowns, rankings, ratios, and what-if projections.  The ledger is
/// read-only calibration data; nothing here re-measures anything.
namespace biobench::power {

enum class Platform { rp2040, stm32l4r5zi, apollo3blue, gap8, gap9 };

inline constexpr std::array<Platform, 5> kAllPlatforms = {
    Platform::rp2040, Platform::stm32l4r5zi, Platform::apollo3blue,
    Platform::gap8, Platform::gap9};

std::string to_string(Platform p);

/// Case-insensitive; "apollo3" is accepted as shorthand.  Unknown names
/// throw ConfigError.
Platform parse_platform(std::string_view name);

/// One table row.  BPfree rows carry no idle or acquisition energy (the
/// workload has no such phases), so those fields are absent rather than
/// zero.
struct PlatformEnergyRecord {
  Platform platform = Platform::rp2040;
  AppId app = AppId::HCL;
  double mcycles = 0;
  std::optional<double> idle_mj;
  std::optional<double> acq_mj;
  double proc_mj = 0;
  double total_mj = 0;

  /// Phase energies must re-sum to the total within the table's 0.001 mJ
  /// rounding budget.  Throws DataError naming the offending row.
  void validate() const;
};

/// Parse data/platform_energy.csv.  Columns
/// platform,app,mcycles,idle_mJ,acq_mJ,proc_mJ,total_mJ; '#' lines are
/// comments; '-' marks an absent value; a row whose energies are all
/// absent records nothing (that platform never ran the app).  Every record
/// is integrity-checked on load.
std::vector<PlatformEnergyRecord> load_energy_table(
    const std::filesystem::path& path);

struct PhaseShares {
  Platform platform = Platform::rp2040;
  double idle = 0;
  double acq = 0;
  double proc = 0;
};

/// Per-platform share of each phase in the total, in [0,1] and summing to
/// one.  Apps absent from the records throw DomainError.
std::vector<PhaseShares> energy_breakdown(
    std::span<const PlatformEnergyRecord> records, AppId app);

struct PlatformComparison {
  AppId app = AppId::HCL;
  /// Ascending total energy; front() is the most efficient platform.
  std::vector<std::pair<Platform, double>> ranking;
  /// Data caveats a consumer should surface next to the numbers.
  std::vector<std::string> notes;
};

PlatformComparison compare_platforms(
    std::span<const PlatformEnergyRecord> records, AppId app);

/// total(b) / total(a): how many times more energy b burns than a.
double energy_ratio(std::span<const PlatformEnergyRecord> records, AppId app,
                    Platform a, Platform b);

/// Smallest cycle count any platform needed for the app.  Used as the
/// processing-budget reference when simulating duty cycles.
double min_mcycles(std::span<const PlatformEnergyRecord> records, AppId app);

struct ProjectionScale {
  double duty_scale = 1.0;   ///< multiplies processing time and cycles
  double clock_scale = 1.0;  ///< multiplies the clock rate, shrinking time
};

/// What-if projection over one record.  Processing energy scales with
/// duty_scale (same energy per cycle); idle energy scales with the
/// recomputed idle-time fraction; acquisition is untouched; the total is
/// re-summed.  clock_scale changes active time, not energy per cycle.
/// window_seconds and clock_hz anchor the time arithmetic.  A projection
/// that pushes active time past the window throws DomainError.
PlatformEnergyRecord project_energy(const PlatformEnergyRecord& record,
                                    const ProjectionScale& scale,
                                    double window_seconds, double clock_hz);

/// Board summary used for report context.
struct PlatformProfile {
  Platform platform = Platform::rp2040;
  std::string board;
  std::string manufacturer;
  std::string processor;
  bool fpu = false;
  std::uint32_t ram_kib = 0;
  std::uint32_t flash_mb = 0;
};

/// Parse data/platforms.csv: platform,board,manufacturer,processor,fpu,
/// ram_kib,flash_mb.
std::vector<PlatformProfile> load_platform_profiles(
    const std::filesystem::path& path);

}  // namespace biobench::power

#endif  // BIOBENCH_POWER_HPP
