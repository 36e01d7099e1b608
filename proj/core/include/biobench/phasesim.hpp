#ifndef BIOBENCH_PHASESIM_HPP
#define BIOBENCH_PHASESIM_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "biobench/errors.hpp"
#include "biobench/sigio.hpp"

/// Steady-state execution-phase model of one acquisition window.  The MCU
/// sleeps while the external ADC fills its 768-byte buffer, wakes briefly to
/// drain it, and runs the algorithm either once per window or in per-batch
/// chunks.  The canonical cycle starts right after the previous window's
/// final buffer drain, so window-level processing appears at the front of
/// the timeline.
namespace biobench::phasesim {

enum class Phase { idle, acquisition, processing };

std::string to_string(Phase p);

struct Segment {
  Phase phase = Phase::idle;
  double start_s = 0;
  double duration_s = 0;
  double cycles = 0;  ///< CPU cycles spent; nonzero only while processing

  double end_s() const { return start_s + duration_s; }
};

enum class ProcessingPlacement { end_of_window, per_batch };

struct SimOptions {
  ProcessingPlacement placement = ProcessingPlacement::end_of_window;
  /// Time the MCU spends draining one full buffer.  Zero models DMA as
  /// instantaneous and leaves zero-length markers at the drain instants.
  double transfer_seconds_per_batch = 0;
};

struct PhaseTimeline {
  double window_seconds = 0;
  std::vector<Segment> segments;  ///< sorted, tiling [0, window]

  double processing_seconds() const;
  double acquisition_seconds() const;
  double idle_seconds() const;

  /// Segments must be ordered, non-overlapping, inside the window, and sum
  /// to exactly the window duration.  Throws StateError otherwise.
  void validate() const;
};

/// Lay one window's phases on the timeline.  Buffer drains finish at
/// min((k+1) * batch_period, window); a drain burst occupies the interval
/// just before its finish instant.  Bursts swallowed by processing are
/// clipped away.  Throws RealTimeViolation when the processing demand
/// cannot finish inside the window.
PhaseTimeline simulate_cycle(const sigio::AcquisitionSchedule& schedule,
                             double window_seconds, double processing_seconds,
                             const SimOptions& options = {});

/// Same cycle expressed as a processing budget in CPU cycles at a given
/// clock.  Cycles are spread over the processing segments in proportion to
/// their durations.
PhaseTimeline simulate_cycle_at_clock(const sigio::AcquisitionSchedule& schedule,
                                      double window_seconds,
                                      double processing_cycles, double clock_hz,
                                      const SimOptions& options = {});

/// Fraction of the window spent in the processing phase.
double duty_cycle(const PhaseTimeline& timeline);

enum class DutyBin { very_low, low, medium, high, very_high };

/// Half-open decades: [0, 1e-3) very_low, [1e-3, 1e-2) low, [1e-2, 0.15)
/// medium, [0.15, 0.6) high, [0.6, ...) very_high.
DutyBin duty_bin(double duty);

std::string to_string(DutyBin bin);

struct DutyCycleReport {
  double ratio = 0;
  DutyBin bin = DutyBin::very_low;
};

DutyCycleReport duty_report(const PhaseTimeline& timeline);

/// phase,start_s,duration_s,cycles rows.
void export_csv(const PhaseTimeline& timeline,
                const std::filesystem::path& path);

}  // namespace biobench::phasesim

#endif  // BIOBENCH_PHASESIM_HPP
