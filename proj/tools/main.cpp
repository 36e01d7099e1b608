// biobench: run the eight benchmark applications, characterize them by the
// five workload metrics, and compare measured platform energies.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 runtime error.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "biobench/apps.hpp"
#include "biobench/errors.hpp"
#include "biobench/power.hpp"
#include "biobench/report.hpp"

namespace fs = std::filesystem;
using namespace biobench;

namespace {

fs::path resolve_data_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("BIOBENCH_DATA")) return env;
  return "data";
}

// The energy table is optional for run/characterize: without it the duty
// metric is omitted, everything else still works.
std::vector<power::PlatformEnergyRecord> try_load_table(const fs::path& dir) {
  const fs::path path = dir / "platform_energy.csv";
  if (!fs::exists(path)) return {};
  return power::load_energy_table(path);
}

double reference_mcycles(const std::vector<power::PlatformEnergyRecord>& records,
                         AppId app) {
  if (records.empty()) return 0;
  return power::min_mcycles(records, app);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot write output file " + out_path);
  out << text;
}

apps::AppConfig config_for(AppId app, const std::string& config_path) {
  if (config_path.empty()) return apps::default_config(app);
  apps::AppConfig cfg = apps::load_config(config_path);
  if (cfg.app != app)
    throw ConfigError("config file is for '" +
                      std::string(to_string(cfg.app)) + "', not '" +
                      std::string(to_string(app)) + "'");
  return cfg;
}

struct CommonOpts {
  std::string data_dir;
  std::string format = "text";
  std::string out_path;
};

int cmd_run(const std::string& app_name, const std::string& config_path,
            const std::string& input_dir, std::uint64_t seed, double clock_hz,
            bool timing, const std::string& timeline_csv,
            const CommonOpts& common) {
  const AppId app = parse_app_id(app_name);
  const apps::AppConfig cfg = config_for(app, config_path);
  const fs::path data = resolve_data_dir(common.data_dir);

  report::RunOptions opts;
  opts.seed = seed;
  if (!input_dir.empty()) opts.input_dir = fs::path(input_dir);
  opts.duty = {reference_mcycles(try_load_table(data), app), clock_hz};
  opts.timing = timing;
  if (!timeline_csv.empty()) opts.timeline_csv = fs::path(timeline_csv);

  const report::RunReport rep = report::run_app(cfg, opts);
  emit(report::render(rep, report::parse_format(common.format)),
       common.out_path);
  return 0;
}

int cmd_characterize(const std::string& app_name,
                     const std::string& config_path, std::uint64_t seed,
                     double clock_hz, unsigned jobs,
                     const CommonOpts& common) {
  std::vector<AppId> ids;
  if (app_name.empty())
    ids.assign(kAllApps.begin(), kAllApps.end());
  else
    ids.push_back(parse_app_id(app_name));
  if (!config_path.empty() && ids.size() != 1)
    throw ConfigError("--config needs a single app");

  const auto records = try_load_table(resolve_data_dir(common.data_dir));

  std::vector<apps::AppMetrics> rows(ids.size());
  std::atomic<std::size_t> next{0};
  std::mutex fail_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < ids.size();) {
      try {
        const apps::AppConfig cfg = config_for(ids[i], config_path);
        rows[i] = report::characterize_app(
            cfg, seed, {reference_mcycles(records, ids[i]), clock_hz});
      } catch (...) {
        std::lock_guard<std::mutex> lock(fail_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(ids.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  emit(report::render_metrics(rows, report::parse_format(common.format)),
       common.out_path);
  return 0;
}

int cmd_compare(const std::vector<std::string>& app_names,
                const std::vector<std::string>& platform_names,
                const std::string& table_path, const CommonOpts& common) {
  fs::path path = table_path.empty()
                      ? resolve_data_dir(common.data_dir) / "platform_energy.csv"
                      : fs::path(table_path);
  std::vector<power::PlatformEnergyRecord> records =
      power::load_energy_table(path);

  if (!platform_names.empty()) {
    std::vector<power::Platform> keep;
    for (const auto& name : platform_names)
      keep.push_back(power::parse_platform(name));
    std::vector<power::PlatformEnergyRecord> filtered;
    for (const auto& rec : records)
      for (power::Platform p : keep)
        if (rec.platform == p) {
          filtered.push_back(rec);
          break;
        }
    if (filtered.empty())
      throw ConfigError("platform filter matches no measured rows");
    records = std::move(filtered);
  }

  std::vector<AppId> ids;
  if (app_names.empty()) {
    for (AppId app : kAllApps)
      for (const auto& rec : records)
        if (rec.app == app) {
          ids.push_back(app);
          break;
        }
  } else {
    for (const auto& name : app_names) ids.push_back(parse_app_id(name));
  }

  std::vector<report::ComparisonReport> rows;
  for (AppId app : ids) rows.push_back(report::compare_app(records, app));

  emit(report::render_comparisons(rows, report::parse_format(common.format)),
       common.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"desk-scale biomedical TinyML benchmark harness"};
  cli.require_subcommand(1);

  CommonOpts run_common, chr_common, cmp_common;
  run_common.format = "json";

  std::string run_name, run_config, run_input, run_timeline;
  std::uint64_t run_seed = 1;
  double run_clock = 80e6;
  bool run_synthetic = false, run_timing = false;
  auto* run = cli.add_subcommand("run", "run one application window");
  run->add_option("app", run_name, "application id")->required();
  run->add_option("--config", run_config, "config JSON path");
  auto* opt_input =
      run->add_option("--input", run_input, "fixture directory with one CSV per signal");
  run->add_flag("--synthetic", run_synthetic,
                "use the built-in synthetic input (default)")
      ->excludes(opt_input);
  run->add_option("--seed", run_seed, "synthetic input seed");
  run->add_option("--clock", run_clock, "duty simulation clock in Hz");
  run->add_flag("--timing", run_timing,
                "include wall time (breaks byte determinism)");
  run->add_option("--timeline", run_timeline, "write the phase timeline CSV here");
  run->add_option("--format", run_common.format, "json, csv, or text");
  run->add_option("--out", run_common.out_path, "write the report here instead of stdout");
  run->add_option("--data", run_common.data_dir,
                  "asset directory (default: $BIOBENCH_DATA or ./data)");

  std::string chr_name, chr_config;
  std::uint64_t chr_seed = 1;
  double chr_clock = 80e6;
  unsigned chr_jobs = 1;
  auto* chr = cli.add_subcommand(
      "characterize", "metric table for one app or all eight");
  chr->add_option("app", chr_name, "application id (omit for all)");
  chr->add_option("--config", chr_config, "config JSON path (single app only)");
  chr->add_option("--seed", chr_seed, "synthetic input seed");
  chr->add_option("--clock", chr_clock, "duty simulation clock in Hz");
  chr->add_option("--jobs", chr_jobs, "apps characterized in parallel");
  chr->add_option("--format", chr_common.format, "json, csv, or text");
  chr->add_option("--out", chr_common.out_path, "write the table here instead of stdout");
  chr->add_option("--data", chr_common.data_dir,
                  "asset directory (default: $BIOBENCH_DATA or ./data)");

  std::vector<std::string> cmp_apps, cmp_platforms;
  std::string cmp_table;
  auto* cmp = cli.add_subcommand(
      "compare", "platform energy rankings and phase breakdowns");
  cmp->add_option("--apps", cmp_apps, "apps to compare (default: all measured)");
  cmp->add_option("--platforms", cmp_platforms, "platform filter");
  cmp->add_option("--table", cmp_table, "energy table CSV path");
  cmp->add_option("--format", cmp_common.format, "json, csv, or text");
  cmp->add_option("--out", cmp_common.out_path, "write the output here instead of stdout");
  cmp->add_option("--data", cmp_common.data_dir,
                  "asset directory (default: $BIOBENCH_DATA or ./data)");

  try {
    cli.parse(argc, argv);
    if (run->parsed())
      return cmd_run(run_name, run_config, run_input, run_seed, run_clock,
                     run_timing, run_timeline, run_common);
    if (chr->parsed())
      return cmd_characterize(chr_name, chr_config, chr_seed, chr_clock,
                              chr_jobs, chr_common);
    if (cmp->parsed())
      return cmd_compare(cmp_apps, cmp_platforms, cmp_table, cmp_common);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
