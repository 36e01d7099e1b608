#include "biobench/phasesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace biobench::phasesim {

namespace {

constexpr double kSlack = 1e-9;

double phase_seconds(const PhaseTimeline& t, Phase p) {
  double total = 0;
  for (const auto& s : t.segments) {
    if (s.phase == p) total += s.duration_s;
  }
  return total;
}

// Drain-finish instants relative to the cycle start. The final buffer may
// be partial, so its drain finishes exactly at the window boundary.
std::vector<double> drain_instants(const sigio::AcquisitionSchedule& sched,
                                   double window_seconds) {
  std::vector<double> out;
  out.reserve(sched.batches_per_window);
  for (std::uint32_t k = 0; k < sched.batches_per_window; ++k) {
    double t = static_cast<double>(k + 1) * sched.batch_period_s;
    out.push_back(std::min(t, window_seconds));
  }
  return out;
}

// Remove the parts of [lo, hi) covered by processing segments. Keeps the
// leftmost surviving piece; a fully covered burst vanishes.
bool clip_against(const std::vector<Segment>& proc, double& lo, double& hi) {
  for (const auto& s : proc) {
    if (s.duration_s <= 0) continue;
    if (s.end_s() <= lo || s.start_s >= hi) continue;
    if (s.start_s <= lo) {
      lo = std::min(s.end_s(), hi);
    } else {
      hi = s.start_s;
    }
  }
  return hi - lo > 0;
}

}  // namespace

std::string to_string(Phase p) {
  switch (p) {
    case Phase::idle:
      return "idle";
    case Phase::acquisition:
      return "acquisition";
    case Phase::processing:
      return "processing";
  }
  throw DomainError("unknown phase");
}

double PhaseTimeline::processing_seconds() const {
  return phase_seconds(*this, Phase::processing);
}

double PhaseTimeline::acquisition_seconds() const {
  return phase_seconds(*this, Phase::acquisition);
}

double PhaseTimeline::idle_seconds() const {
  return phase_seconds(*this, Phase::idle);
}

void PhaseTimeline::validate() const {
  if (!(window_seconds > 0)) throw StateError("timeline has no window");
  double covered = 0;
  double cursor = 0;
  for (const auto& s : segments) {
    if (s.duration_s < 0) throw StateError("negative segment duration");
    if (s.start_s < cursor - kSlack) throw StateError("segments overlap");
    if (s.start_s < -kSlack || s.end_s() > window_seconds + kSlack)
      throw StateError("segment outside window");
    cursor = std::max(cursor, s.end_s());
    covered += s.duration_s;
  }
  if (std::fabs(covered - window_seconds) > 1e-6 * window_seconds + kSlack)
    throw StateError("segments do not tile the window");
}

PhaseTimeline simulate_cycle(const sigio::AcquisitionSchedule& schedule,
                             double window_seconds, double processing_seconds,
                             const SimOptions& options) {
  if (!(window_seconds > 0)) throw DomainError("window must be positive");
  if (processing_seconds < 0) throw DomainError("negative processing time");
  if (schedule.batches_per_window == 0)
    throw DomainError("schedule has no batches");
  if (options.transfer_seconds_per_batch < 0)
    throw DomainError("negative transfer time");
  if (options.transfer_seconds_per_batch >
      schedule.batch_period_s + kSlack)
    throw DomainError("buffer drain longer than the batch period");
  if (processing_seconds > window_seconds + kSlack)
    throw RealTimeViolation("processing exceeds the acquisition window");

  const auto drains = drain_instants(schedule, window_seconds);
  const double dt = options.transfer_seconds_per_batch;

  // Processing segments first; acquisition bursts are clipped against them.
  std::vector<Segment> proc;
  if (processing_seconds > 0) {
    if (options.placement == ProcessingPlacement::end_of_window) {
      // Runs when the last drain of the previous window lands, which is the
      // cycle origin.
      proc.push_back({Phase::processing, 0, processing_seconds});
    } else {
      // One chunk per buffer. The chunk for the final buffer of the
      // previous window wraps around to the cycle origin; the rest queue
      // behind their drain instants.
      const std::size_t n = drains.size();
      const double chunk = processing_seconds / static_cast<double>(n);
      double prev_end = 0;
      proc.push_back({Phase::processing, 0, chunk});
      prev_end = chunk;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        double start = std::max(drains[k], prev_end);
        proc.push_back({Phase::processing, start, chunk});
        prev_end = start + chunk;
      }
      if (prev_end > window_seconds + kSlack)
        throw RealTimeViolation("per-batch chunks spill past the window");
    }
  }

  std::vector<Segment> segs = proc;
  for (double finish : drains) {
    double lo = finish - dt;
    double hi = finish;
    if (dt == 0) {
      // Zero-length marker at the drain instant; drop it only when it sits
      // strictly inside a processing interval.
      bool inside = false;
      for (const auto& s : proc)
        if (s.start_s < finish && finish < s.end_s()) inside = true;
      if (!inside) segs.push_back({Phase::acquisition, finish, 0});
      continue;
    }
    if (clip_against(proc, lo, hi))
      segs.push_back({Phase::acquisition, lo, hi - lo});
  }

  // Zero-length markers sharing an instant with a chunk must come first or
  // the tiling pass would read them as overlapping the chunk.
  std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) {
    if (a.start_s != b.start_s) return a.start_s < b.start_s;
    return a.duration_s < b.duration_s;
  });

  // Fill the gaps with idle so the segments tile the window exactly.
  PhaseTimeline timeline;
  timeline.window_seconds = window_seconds;
  double cursor = 0;
  for (const auto& s : segs) {
    if (s.start_s > cursor + kSlack)
      timeline.segments.push_back({Phase::idle, cursor, s.start_s - cursor});
    timeline.segments.push_back(s);
    cursor = std::max(cursor, s.end_s());
  }
  if (cursor < window_seconds - kSlack)
    timeline.segments.push_back(
        {Phase::idle, cursor, window_seconds - cursor});

  timeline.validate();
  return timeline;
}

PhaseTimeline simulate_cycle_at_clock(const sigio::AcquisitionSchedule& schedule,
                                      double window_seconds,
                                      double processing_cycles, double clock_hz,
                                      const SimOptions& options) {
  if (!(clock_hz > 0)) throw DomainError("clock must be positive");
  if (processing_cycles < 0) throw DomainError("negative cycle count");
  auto timeline = simulate_cycle(schedule, window_seconds,
                                 processing_cycles / clock_hz, options);
  const double total = timeline.processing_seconds();
  if (total > 0) {
    for (auto& s : timeline.segments)
      if (s.phase == Phase::processing)
        s.cycles = processing_cycles * (s.duration_s / total);
  }
  return timeline;
}

double duty_cycle(const PhaseTimeline& timeline) {
  if (!(timeline.window_seconds > 0))
    throw StateError("timeline has no window");
  return timeline.processing_seconds() / timeline.window_seconds;
}

DutyCycleReport duty_report(const PhaseTimeline& timeline) {
  DutyCycleReport r;
  r.ratio = duty_cycle(timeline);
  r.bin = duty_bin(r.ratio);
  return r;
}

DutyBin duty_bin(double duty) {
  if (duty < 0 || !std::isfinite(duty))
    throw DomainError("duty cycle must be a finite non-negative fraction");
  if (duty < 1e-3) return DutyBin::very_low;
  if (duty < 1e-2) return DutyBin::low;
  if (duty < 0.15) return DutyBin::medium;
  if (duty < 0.6) return DutyBin::high;
  return DutyBin::very_high;
}

std::string to_string(DutyBin bin) {
  switch (bin) {
    case DutyBin::very_low:
      return "very_low";
    case DutyBin::low:
      return "low";
    case DutyBin::medium:
      return "medium";
    case DutyBin::high:
      return "high";
    case DutyBin::very_high:
      return "very_high";
  }
  throw DomainError("unknown duty bin");
}

void export_csv(const PhaseTimeline& timeline,
                const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw FormatError("cannot open " + path.string() + " for writing");
  std::fprintf(f, "phase,start_s,duration_s,cycles\n");
  for (const auto& s : timeline.segments)
    std::fprintf(f, "%s,%.9g,%.9g,%.9g\n", to_string(s.phase).c_str(),
                 s.start_s, s.duration_s, s.cycles);
  std::fclose(f);
}

}  // namespace biobench::phasesim
