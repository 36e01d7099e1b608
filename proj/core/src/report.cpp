#include "biobench/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <chrono>
#include <sstream>

#include <json.hpp>

#include "biobench/errors.hpp"
#include "biobench/sigio.hpp"

namespace biobench::report {

using nlohmann::json;

namespace {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

// Shortest round-trip decimal, identical on every run.
std::string num(double v) { return json(v).dump(); }

json counters_to_json(const OpCounters& c) {
  json j;
  j["branches"] = c.branches;
  j["fxp_mul"] = c.fxp_mul;
  j["fxp_mac"] = c.fxp_mac;
  j["fp_mul"] = c.fp_mul;
  j["fp_mac"] = c.fp_mac;
  j["loads_stores"] = c.loads_stores;
  return j;
}

json metrics_to_json(const apps::AppMetrics& m) {
  json j;
  j["app"] = to_string(m.app);
  j["dominant_category"] = category_name(m.dominant);
  j["main_operations"] = m.main_operations;
  j["duty_ratio"] = m.duty_ratio ? json(*m.duty_ratio) : json();
  j["duty_bin"] = m.duty_bin ? json(phasesim::to_string(*m.duty_bin)) : json();
  j["realtime_violation"] = m.realtime_violation;
  j["input_bandwidth_bps"] =
      m.input_bandwidth_bps ? json(*m.input_bandwidth_bps) : json();
  j["static_kib"] = m.static_kib;
  j["dynamic_kib"] = m.dynamic_kib;
  j["notes"] = m.notes;
  return j;
}

json provenance_for(const apps::AppMetrics& m) {
  json p;
  p["counters"] = kProvenanceDesk;
  p["memory"] = kProvenanceDesk;
  if (m.input_bandwidth_bps) p["input_bandwidth_bps"] = kProvenanceDesk;
  if (m.duty_ratio) {
    p["duty_reference_mcycles"] = kProvenanceMeasured;
    p["duty_ratio"] = kProvenanceDesk;
  }
  return p;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += "; ";
    out += items[i];
  }
  return out;
}

std::string table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::string cell = row[i];
      if (cell.size() < width[i]) cell.append(width[i] - cell.size(), ' ');
      if (i) line += "  ";
      line += cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

// Text tables round phase shares for readability; json/csv keep full precision.
std::string pct(double share) {
  return num(std::round(share * 1000.0) / 10.0) + "%";
}

std::string duty_line(const apps::AppMetrics& m,
                      const std::optional<apps::DutyReference>& ref) {
  if (!m.duty_ratio) return "-";
  std::string s = num(*m.duty_ratio) + " (" + phasesim::to_string(*m.duty_bin) + ")";
  if (ref) s += " at " + num(ref->clock_hz / 1e6) + " MHz";
  if (m.realtime_violation) s += " [violation]";
  return s;
}

}  // namespace

TimelineSummary summarize(const phasesim::PhaseTimeline& timeline) {
  TimelineSummary s;
  s.window_seconds = timeline.window_seconds;
  s.idle_seconds = timeline.idle_seconds();
  s.acquisition_seconds = timeline.acquisition_seconds();
  s.processing_seconds = timeline.processing_seconds();
  s.segments = timeline.segments.size();
  return s;
}

std::string config_hash(const apps::AppConfig& config) {
  return "fnv1a64:" + hex16(fnv1a64(apps::to_canonical_json(config)));
}

RunReport run_app(const apps::AppConfig& config, const RunOptions& options) {
  RunReport r;
  r.app_id = to_string(config.app);
  r.config_hash = config_hash(config);
  r.seed = options.seed;

  auto pipeline = apps::build_app(config);
  apps::WindowInput input;
  if (options.input_dir) {
    input = apps::load_input_dir(config, *options.input_dir);
    r.input_source = options.input_dir->string();
  } else {
    input = apps::synthesize_input(config, options.seed);
    r.input_source = "synthetic";
  }

  const auto t0 = std::chrono::steady_clock::now();
  r.classification = pipeline->process_window(input);
  const auto t1 = std::chrono::steady_clock::now();
  if (options.timing)
    r.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

  r.metrics = apps::characterize(*pipeline, options.duty);
  r.counters = pipeline->counters();

  const bool has_acquisition = !config.specs.empty();
  if (has_acquisition && options.duty.mcycles <= 0) {
    r.metrics.duty_ratio.reset();
    r.metrics.duty_bin.reset();
    r.metrics.realtime_violation = false;
    r.metrics.notes.push_back("no processing-cycle reference; duty omitted");
  }
  if (has_acquisition && options.duty.mcycles > 0) {
    r.duty_reference = options.duty;
    if (!r.metrics.realtime_violation) {
      auto sched = sigio::schedule_acquisition(
          config.specs, config.window_seconds, config.buffer_bytes);
      auto timeline = phasesim::simulate_cycle_at_clock(
          sched, config.window_seconds, options.duty.mcycles * 1e6,
          options.duty.clock_hz);
      r.timeline = summarize(timeline);
      if (options.timeline_csv)
        phasesim::export_csv(timeline, *options.timeline_csv);
    }
  }
  return r;
}

apps::AppMetrics characterize_app(const apps::AppConfig& config,
                                  std::uint64_t seed,
                                  const apps::DutyReference& duty) {
  auto pipeline = apps::build_app(config);
  pipeline->process_window(apps::synthesize_input(config, seed));
  apps::AppMetrics m = apps::characterize(*pipeline, duty);
  if (!config.specs.empty() && duty.mcycles <= 0) {
    m.duty_ratio.reset();
    m.duty_bin.reset();
    m.realtime_violation = false;
    m.notes.push_back("no processing-cycle reference; duty omitted");
  }
  return m;
}

Format parse_format(std::string_view name) {
  std::string low(name);
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  if (low == "json") return Format::json;
  if (low == "csv") return Format::csv;
  if (low == "text") return Format::text;
  throw ConfigError("unknown format '" + std::string(name) +
                    "' (expected json, csv, or text)");
}

std::string render(const RunReport& r, Format fmt) {
  if (fmt == Format::json) {
    json j;
    j["schema_version"] = r.schema_version;
    j["app"] = r.app_id;
    j["config_hash"] = r.config_hash;
    j["seed"] = r.seed;
    j["input"] = r.input_source;
    json cls;
    cls["label"] = r.classification.label;
    cls["score"] = r.classification.score;
    cls["values"] = r.classification.values;
    cls["notes"] = r.classification.notes;
    j["classification"] = std::move(cls);
    j["metrics"] = metrics_to_json(r.metrics);
    j["counters"] = counters_to_json(r.counters);
    j["provenance"] = provenance_for(r.metrics);
    if (r.duty_reference) {
      json d;
      d["mcycles"] = r.duty_reference->mcycles;
      d["clock_hz"] = r.duty_reference->clock_hz;
      j["duty_reference"] = std::move(d);
    } else {
      j["duty_reference"] = json();
    }
    if (r.timeline) {
      json t;
      t["window_seconds"] = r.timeline->window_seconds;
      t["idle_seconds"] = r.timeline->idle_seconds;
      t["acquisition_seconds"] = r.timeline->acquisition_seconds;
      t["processing_seconds"] = r.timeline->processing_seconds;
      t["segments"] = r.timeline->segments;
      j["timeline"] = std::move(t);
    } else {
      j["timeline"] = json();
    }
    if (r.wall_seconds) j["wall_seconds"] = *r.wall_seconds;
    return j.dump(2) + "\n";
  }

  if (fmt == Format::csv) {
    std::string head =
        "schema_version,app,config_hash,seed,input,label,score,"
        "dominant_category,main_operations,duty_ratio,duty_bin,"
        "realtime_violation,input_bandwidth_bps,static_kib,dynamic_kib,"
        "branches,fxp_mul,fxp_mac,fp_mul,fp_mac,loads_stores,wall_seconds";
    const auto& m = r.metrics;
    std::string row;
    auto add = [&row](const std::string& cell) {
      if (!row.empty()) row += ',';
      row += csv_cell(cell);
    };
    add(std::to_string(r.schema_version));
    add(r.app_id);
    add(r.config_hash);
    add(std::to_string(r.seed));
    add(r.input_source);
    add(r.classification.label);
    add(num(r.classification.score));
    add(category_name(m.dominant));
    add(m.main_operations);
    add(m.duty_ratio ? num(*m.duty_ratio) : "");
    add(m.duty_bin ? phasesim::to_string(*m.duty_bin) : "");
    add(m.realtime_violation ? "1" : "0");
    add(m.input_bandwidth_bps ? num(*m.input_bandwidth_bps) : "");
    add(num(m.static_kib));
    add(num(m.dynamic_kib));
    add(std::to_string(r.counters.branches));
    add(std::to_string(r.counters.fxp_mul));
    add(std::to_string(r.counters.fxp_mac));
    add(std::to_string(r.counters.fp_mul));
    add(std::to_string(r.counters.fp_mac));
    add(std::to_string(r.counters.loads_stores));
    add(r.wall_seconds ? num(*r.wall_seconds) : "");
    return head + "\n" + row + "\n";
  }

  std::ostringstream out;
  const auto& m = r.metrics;
  out << "run report (schema " << r.schema_version << ")\n";
  out << "  app:             " << r.app_id << "\n";
  out << "  config hash:     " << r.config_hash << "\n";
  out << "  seed:            " << r.seed << "\n";
  out << "  input:           " << r.input_source << "\n";
  out << "  label:           " << r.classification.label << "\n";
  out << "  score:           " << num(r.classification.score) << "\n";
  if (!r.classification.values.empty()) {
    out << "  values:          ";
    for (std::size_t i = 0; i < r.classification.values.size(); ++i) {
      if (i) out << ", ";
      out << num(r.classification.values[i]);
    }
    out << "\n";
  }
  out << "  main operations: " << m.main_operations << " [" << kProvenanceDesk
      << "]\n";
  out << "  duty cycle:      " << duty_line(m, r.duty_reference) << "\n";
  out << "  bandwidth:       "
      << (m.input_bandwidth_bps ? num(*m.input_bandwidth_bps) + " B/s" : "-")
      << "\n";
  out << "  static memory:   " << num(m.static_kib) << " KiB ["
      << kProvenanceDesk << "]\n";
  out << "  dynamic memory:  " << num(m.dynamic_kib) << " KiB ["
      << kProvenanceDesk << "]\n";
  out << "  ops:             branches " << r.counters.branches << ", fxp mul "
      << r.counters.fxp_mul << ", fxp mac " << r.counters.fxp_mac
      << ", fp mul " << r.counters.fp_mul << ", fp mac " << r.counters.fp_mac
      << ", loads/stores " << r.counters.loads_stores << "\n";
  if (r.timeline) {
    out << "  timeline:        idle " << num(r.timeline->idle_seconds)
        << " s, acquisition " << num(r.timeline->acquisition_seconds)
        << " s, processing " << num(r.timeline->processing_seconds) << " s in "
        << r.timeline->segments << " segments\n";
  }
  for (const auto& n : r.classification.notes) out << "  note:            " << n << "\n";
  for (const auto& n : m.notes) out << "  note:            " << n << "\n";
  if (r.wall_seconds)
    out << "  wall time:       " << num(*r.wall_seconds) << " s\n";
  return out.str();
}

std::string render_metrics(std::span<const apps::AppMetrics> rows, Format fmt) {
  if (fmt == Format::json) {
    json arr = json::array();
    for (const auto& m : rows) {
      json j = metrics_to_json(m);
      j["provenance"] = provenance_for(m);
      arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
  }

  if (fmt == Format::csv) {
    std::string out =
        "app,main_operations,dominant_category,duty_ratio,duty_bin,"
        "realtime_violation,input_bandwidth_bps,static_kib,dynamic_kib,notes\n";
    for (const auto& m : rows) {
      std::string row;
      auto add = [&row](const std::string& cell) {
        if (!row.empty()) row += ',';
        row += csv_cell(cell);
      };
      add(to_string(m.app));
      add(m.main_operations);
      add(category_name(m.dominant));
      add(m.duty_ratio ? num(*m.duty_ratio) : "");
      add(m.duty_bin ? phasesim::to_string(*m.duty_bin) : "");
      add(m.realtime_violation ? "1" : "0");
      add(m.input_bandwidth_bps ? num(*m.input_bandwidth_bps) : "");
      add(num(m.static_kib));
      add(num(m.dynamic_kib));
      add(join_list(m.notes));
      out += row + "\n";
    }
    return out;
  }

  std::vector<std::vector<std::string>> cells;
  cells.push_back({"app", "main operations", "duty cycle", "bandwidth B/s",
                   "static KiB", "dynamic KiB"});
  for (const auto& m : rows) {
    cells.push_back({to_string(m.app), m.main_operations,
                     duty_line(m, std::nullopt),
                     m.input_bandwidth_bps ? num(*m.input_bandwidth_bps) : "-",
                     num(m.static_kib), num(m.dynamic_kib)});
  }
  std::string out = table(cells);
  for (const auto& m : rows)
    for (const auto& n : m.notes)
      out += std::string(to_string(m.app)) + ": " + n + "\n";
  return out;
}

ComparisonReport compare_app(std::span<const power::PlatformEnergyRecord> records,
                             AppId app) {
  ComparisonReport r;
  r.app = app;
  r.comparison = power::compare_platforms(records, app);
  r.breakdown = power::energy_breakdown(records, app);
  return r;
}

std::string render_comparisons(std::span<const ComparisonReport> rows,
                               Format fmt) {
  auto shares_for = [](const ComparisonReport& r, power::Platform p)
      -> const power::PhaseShares* {
    for (const auto& s : r.breakdown)
      if (s.platform == p) return &s;
    return nullptr;
  };

  if (fmt == Format::json) {
    json arr = json::array();
    for (const auto& r : rows) {
      json j;
      j["app"] = to_string(r.app);
      j["provenance"] = kProvenanceMeasured;
      json ranking = json::array();
      for (std::size_t i = 0; i < r.comparison.ranking.size(); ++i) {
        const auto& [platform, total] = r.comparison.ranking[i];
        json e;
        e["rank"] = i + 1;
        e["platform"] = power::to_string(platform);
        e["total_mj"] = total;
        if (const auto* s = shares_for(r, platform)) {
          json sh;
          sh["idle"] = s->idle;
          sh["acquisition"] = s->acq;
          sh["processing"] = s->proc;
          e["phase_shares"] = std::move(sh);
        }
        ranking.push_back(std::move(e));
      }
      j["ranking"] = std::move(ranking);
      j["notes"] = r.comparison.notes;
      arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
  }

  if (fmt == Format::csv) {
    std::string out =
        "app,rank,platform,total_mj,idle_share,acq_share,proc_share\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.comparison.ranking.size(); ++i) {
        const auto& [platform, total] = r.comparison.ranking[i];
        std::string row = std::string(to_string(r.app)) + "," +
                          std::to_string(i + 1) + "," +
                          power::to_string(platform) + "," + num(total);
        if (const auto* s = shares_for(r, platform)) {
          row += "," + num(s->idle) + "," + num(s->acq) + "," + num(s->proc);
        } else {
          row += ",,,";
        }
        out += row + "\n";
      }
    }
    return out;
  }

  std::string out;
  for (const auto& r : rows) {
    out += "app: " + std::string(to_string(r.app)) + "\n";
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"  rank", "platform", "total mJ", "idle", "acquisition",
                     "processing"});
    for (std::size_t i = 0; i < r.comparison.ranking.size(); ++i) {
      const auto& [platform, total] = r.comparison.ranking[i];
      std::vector<std::string> row = {"  " + std::to_string(i + 1),
                                      power::to_string(platform), num(total)};
      if (const auto* s = shares_for(r, platform)) {
        row.push_back(pct(s->idle));
        row.push_back(pct(s->acq));
        row.push_back(pct(s->proc));
      }
      cells.push_back(std::move(row));
    }
    out += table(cells);
    for (const auto& n : r.comparison.notes) out += "  note: " + n + "\n";
  }
  return out;
}

}  // namespace biobench::report
