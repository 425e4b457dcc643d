// Command-line runner: one scenario file or one named preset.
// Exit codes: 0 ok, 1 unexpected failure, 2 configuration error, 3 invariant breach.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "catm/presets.hpp"
#include "catm/simulator.hpp"
#include "catm/radio_model.hpp"
#include "catm/resource_grid.hpp"
#include "catm/tbs_table.hpp"

namespace fs = std::filesystem;
using namespace catm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  f << content;
}

sim::TraceLevel parse_trace(const std::string& s) {
  if (s == "none") return sim::TraceLevel::None;
  if (s == "summary") return sim::TraceLevel::Summary;
  if (s == "full") return sim::TraceLevel::Full;
  throw ConfigError("--trace: expected none, summary or full");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cat-M MAC system-level simulator"};
  std::string scenario_path, preset, out_dir = "out", trace = "none";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> duration;
  int seeds = 5, threads = 1;
  bool quiet = false;
  std::string tables_dir;

  auto* opt_scenario = app.add_option("-s,--scenario", scenario_path, "Scenario JSON file")->check(CLI::ExistingFile);
  auto* opt_preset = app.add_option("-p,--preset", preset, "Preset: fig3 | fig4a | fig4b | fig4c | fig4d | table2 | voip");
  opt_scenario->excludes(opt_preset);
  app.add_option("--seed", seed, "Seed (overrides the scenario; first seed of a preset sweep)");
  app.add_option("-d,--duration-ms", duration, "Duration override in ms")->check(CLI::NonNegativeNumber);
  app.add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("-t,--trace", trace, "Trace verbosity: none | summary | full")->capture_default_str();
  app.add_option("--seeds", seeds, "Seeds per preset point")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("-j,--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("-q,--quiet", quiet, "Do not print the summary");
  app.add_option("--write-tables", tables_dir, "Write the builtin BLER, TBS and narrowband tables as JSON into DIR and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (!tables_dir.empty()) {
      fs::create_directories(tables_dir);
      const fs::path dir(tables_dir);
      write_file(dir / "bler_table.json", radio::BlerModel::builtin().to_json().dump(2) + "\n");
      write_file(dir / "tbs_table.json", TbsTable::builtin().to_json().dump(2) + "\n");
      write_file(dir / "narrowband_layout.json", grid::NarrowbandLayoutTable::builtin().to_json().dump(2) + "\n");
      return 0;
    }
    if (scenario_path.empty() && preset.empty()) throw ConfigError("one of --scenario or --preset is required");
    const sim::TraceLevel level = parse_trace(trace);
    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    if (!preset.empty()) {
      sim::PresetOptions o;
      o.seeds = seeds;
      o.threads = threads;
      o.duration_ms = duration;
      o.trace = level;
      if (seed) o.base_seed = *seed;
      const sim::PresetResult r = sim::run_preset(preset, o);
      write_file(out / (r.name + ".csv"), r.csv);
      write_file(out / (r.name + "_summary.txt"), r.text);
      write_file(out / (r.name + "_summary.json"), r.summary.dump(2) + "\n");
      if (!quiet) std::cout << "preset " << r.name << "\n" << r.text;
      return 0;
    }

    sim::Scenario sc = sim::load_scenario(scenario_path);
    if (seed) sc.seed = *seed;
    if (duration) sc.duration_ms = *duration;
    if (level != sim::TraceLevel::None) sc.output.trace = level;
    const sim::RunOutput r = sim::run_scenario(sc);
    write_file(out / "kpi.csv", sim::kpi_csv(r.report));
    write_file(out / "summary.txt", sim::summary_text(r.report));
    write_file(out / "summary.json", sim::summary_json(r.report).dump(2) + "\n");
    if (sc.output.trace != sim::TraceLevel::None) write_file(out / "trace.csv", r.trace_csv);
    if (!quiet) std::cout << sim::summary_text(r.report);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvariantBreach& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
