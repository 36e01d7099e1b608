#include <algorithm>
#include <sstream>

#include "biobench/apps.hpp"
#include "biobench/sigio.hpp"

namespace biobench::apps {

namespace {

std::string operations_label(OpCategory cat, const std::string& arithmetic) {
  const bool fxp16 = arithmetic == "fxp16";
  switch (cat) {
    case OpCategory::branches: return "branches";
    case OpCategory::fxp_mul:
      return fxp16 ? "16-bit fxp multiplications" : "32-bit fxp multiplications";
    case OpCategory::fxp_mac: return fxp16 ? "16-bit fxp mac" : "32-bit fxp mac";
    case OpCategory::fp_mul: return "32-bit fp multiplications";
    case OpCategory::fp_mac: return "32-bit fp mac";
  }
  return "unknown";
}

}  // namespace

AppMetrics characterize(const Pipeline& pipeline, const DutyReference& duty) {
  if (!pipeline.has_run())
    throw StateError("characterize: the pipeline has not processed a window");
  const AppConfig& config = pipeline.config();

  AppMetrics m;
  m.app = config.app;
  m.dominant = dominant_category(pipeline.counters());
  m.main_operations = operations_label(m.dominant, config.arithmetic);

  if (!config.specs.empty()) {
    const double bw = sigio::input_bandwidth(config.specs);
    m.input_bandwidth_bps = bw;
    if (config.app == AppId::CoughDet)
      m.notes.push_back(
          "computed bandwidth 65200 B/s; the reference characterization lists "
          "64400 (difference under 2%)");

    if (duty.mcycles > 0) {
      const auto sched = sigio::schedule_acquisition(
          config.specs, config.window_seconds, config.buffer_bytes);
      try {
        const auto timeline = phasesim::simulate_cycle_at_clock(
            sched, config.window_seconds, duty.mcycles * 1e6, duty.clock_hz,
            {});
        const auto rep = phasesim::duty_report(timeline);
        m.duty_ratio = rep.ratio;
        m.duty_bin = rep.bin;
      } catch (const RealTimeViolation&) {
        m.duty_ratio = 1.0;
        m.duty_bin = phasesim::DutyBin::very_high;
        m.realtime_violation = true;
        std::ostringstream mhz;
        mhz << duty.clock_hz / 1e6;
        m.notes.push_back("processing budget exceeds the window at " +
                          mhz.str() + " MHz");
      }
    }
  }

  m.static_kib = static_cast<double>(pipeline.memory().static_bytes()) / 1024.0;
  m.dynamic_kib =
      static_cast<double>(pipeline.memory().dynamic_peak_bytes()) / 1024.0;
  return m;
}

std::vector<StageShare> dominant_kernel_share(const Pipeline& pipeline) {
  if (!pipeline.has_run())
    throw StateError("dominant_kernel_share: the pipeline has not run");
  const auto stages = pipeline.stage_stats();
  std::uint64_t total = 0;
  for (const auto& s : stages) total += s.ops.compute_total();
  if (total == 0)
    throw StateError("dominant_kernel_share: no operations recorded");

  std::vector<StageShare> shares;
  shares.reserve(stages.size());
  for (const auto& s : stages)
    shares.push_back({s.name, static_cast<double>(s.ops.compute_total()) /
                                  static_cast<double>(total)});
  std::stable_sort(shares.begin(), shares.end(),
                   [](const StageShare& a, const StageShare& b) {
                     return a.share > b.share;
                   });
  return shares;
}

}  // namespace biobench::apps
