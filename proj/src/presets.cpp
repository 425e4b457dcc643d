#include "catm/presets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "catm/harq_timing.hpp"
#include "catm/simulator.hpp"

namespace catm::sim {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::uint64_t> seed_list(const PresetOptions& o) {
  std::vector<std::uint64_t> s;
  for (int i = 0; i < std::max(1, o.seeds); ++i) s.push_back(o.base_seed + static_cast<std::uint64_t>(i));
  return s;
}

void apply(Scenario& sc, const PresetOptions& o) {
  if (o.duration_ms) sc.duration_ms = *o.duration_ms;
  sc.output.trace = std::max(sc.output.trace, o.trace);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Pooled residual BLER over a batch of runs.
double pooled_residual(const std::vector<const RunOutput*>& runs) {
  std::int64_t done = 0, failed = 0;
  for (const RunOutput* r : runs)
    for (const UeKpi& u : r->report.ues) {
      done += u.tb_completed;
      failed += u.tb_failed;
    }
  return done ? static_cast<double>(failed) / static_cast<double>(done) : 0.0;
}

// --- fig3 -------------------------------------------------------------------

PresetResult fig3(const PresetOptions& o) {
  const std::vector<double> cls{100, 105, 110, 115, 120, 125, 130, 135, 140, 145, 150, 155, 160};
  const std::vector<int> rls{1, 2, 4, 8, 16, 32};
  std::vector<Scenario> runs;
  for (double cl : cls)
    for (int rl : rls)
      for (auto seed : seed_list(o)) {
        runs.push_back(fig3_scenario(cl, rl, seed));
        apply(runs.back(), o);
      }
  const auto out = run_batch(runs, o.threads);
  PresetResult r{"fig3", "", nlohmann::json::object(), ""};
  r.csv = "coupling_loss_db,rl_pdsch,seed,user_experienced_throughput_bps,throughput_bps,mean_latency_ms,"
          "residual_bler,delivered_packets\n";
  std::map<std::pair<double, int>, std::vector<double>> by_point;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const AggregateKpi a = out[i].report.aggregate();
    const double cl = *runs[i].ue_groups[0].coupling_loss_db;
    const int rl = runs[i].ue_groups[0].ce->rl_pdsch;
    r.csv += num(cl) + "," + std::to_string(rl) + "," + std::to_string(runs[i].seed) + "," +
             num(a.user_experienced_throughput_bps) + "," + num(a.throughput_bps) + "," + num(a.mean_latency_ms) +
             "," + num(a.residual_bler) + "," + std::to_string(a.delivered_packets) + "\n";
    by_point[{cl, rl}].push_back(a.user_experienced_throughput_bps);
  }
  r.text = "mean user-experienced throughput (bit/s) by coupling loss and PDSCH RL\n  CL(dB)";
  for (int rl : rls) r.text += "   RL=" + std::to_string(rl) + std::string(rl < 10 ? " " : "");
  r.text += "\n";
  for (double cl : cls) {
    char line[32];
    std::snprintf(line, sizeof line, "  %6.1f", cl);
    r.text += line;
    nlohmann::json row;
    for (int rl : rls) {
      const double m = mean(by_point[{cl, rl}]);
      std::snprintf(line, sizeof line, " %8.0f", m);
      r.text += line;
      row[std::to_string(rl)] = m;
    }
    r.text += "\n";
    r.summary["mean_user_experienced_throughput_bps"][num(cl)] = row;
  }
  return r;
}

// --- fig4a / fig4b ----------------------------------------------------------

PresetResult fig4a(const PresetOptions& o) {
  const std::vector<double> targets{0.05, 0.10, 0.20};
  const std::vector<std::pair<const char*, double>> steps{{"slow", 0.01}, {"fast", 0.1}};
  std::vector<Scenario> runs;
  std::vector<std::pair<double, std::string>> labels;
  for (double t : targets)
    for (const auto& [name, step] : steps)
      for (auto seed : seed_list(o)) {
        Scenario sc = bursty_cell_scenario(seed);
        sc.scheduler.ibler_target = t;
        sc.scheduler.step_up_db = step;
        apply(sc, o);
        runs.push_back(sc);
        labels.emplace_back(t, name);
      }
  const auto out = run_batch(runs, o.threads);
  PresetResult r{"fig4a", "", nlohmann::json::object(), ""};
  r.csv = "ibler_target,step,step_up_db,seed,user_experienced_throughput_bps,mean_ue_throughput_bps,"
          "mean_latency_ms,initial_bler,residual_bler\n";
  std::map<std::string, std::vector<double>> by_cfg;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const AggregateKpi a = out[i].report.aggregate();
    r.csv += num(labels[i].first) + "," + labels[i].second + "," + num(runs[i].scheduler.step_up_db) + "," +
             std::to_string(runs[i].seed) + "," + num(a.user_experienced_throughput_bps) + "," +
             num(a.mean_ue_throughput_bps) + "," + num(a.mean_latency_ms) + "," + num(a.initial_bler) + "," +
             num(a.residual_bler) + "\n";
    by_cfg[num(labels[i].first) + "/" + labels[i].second].push_back(a.user_experienced_throughput_bps);
  }
  double lo = 1e300, hi = -1e300, sum = 0.0;
  for (const auto& [k, v] : by_cfg) {
    const double m = mean(v);
    r.summary["mean_user_experienced_throughput_bps"][k] = m;
    r.text += "  target/step " + k + ": " + num(m) + " bit/s\n";
    lo = std::min(lo, m);
    hi = std::max(hi, m);
    sum += m;
  }
  const double spread = (hi - lo) / (sum / static_cast<double>(by_cfg.size()));
  r.summary["relative_spread"] = spread;
  r.text += "  relative spread " + num(spread) + "\n";
  return r;
}

PresetResult fig4b(const PresetOptions& o) {
  std::vector<Scenario> runs;
  for (auto mode : {ue::PowerControlMode::Olpc, ue::PowerControlMode::Clpc})
    for (auto seed : seed_list(o)) {
      Scenario sc = bursty_cell_scenario(seed);
      for (auto& g : sc.ue_groups) g.power_control.mode = mode;
      apply(sc, o);
      sc.output.trace = TraceLevel::Full;
      runs.push_back(sc);
    }
  const auto out = run_batch(runs, o.threads);
  const std::size_t n = runs.size() / 2;
  PresetResult r{"fig4b", "", nlohmann::json::object(), ""};
  r.csv = "power_control,seed,user_experienced_throughput_bps,mean_latency_ms,residual_bler,trace_identical\n";
  bool all_identical = true;
  double max_diff = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::size_t pair = i < n ? i + n : i - n;
    const bool same = out[i].trace_csv == out[pair].trace_csv;
    all_identical = all_identical && same;
    const AggregateKpi a = out[i].report.aggregate();
    max_diff = std::max(max_diff, std::abs(a.user_experienced_throughput_bps -
                                           out[pair].report.aggregate().user_experienced_throughput_bps));
    r.csv += std::string(i < n ? "OLPC" : "CLPC") + "," + std::to_string(runs[i].seed) + "," +
             num(a.user_experienced_throughput_bps) + "," + num(a.mean_latency_ms) + "," + num(a.residual_bler) +
             "," + (same ? "1" : "0") + "\n";
  }
  r.summary["traces_identical"] = all_identical;
  r.summary["max_throughput_difference_bps"] = max_diff;
  r.text = std::string("  per-TTI power traces identical: ") + (all_identical ? "yes" : "no") +
           "\n  max throughput difference " + num(max_diff) + " bit/s\n";
  return r;
}

// --- fig4c / fig4d: coverage sweeps ------------------------------------------

PresetResult coverage_sweep(const PresetOptions& o, const std::string& name, const std::string& knob,
                            const std::vector<double>& values, const std::function<void(Scenario&, double)>& set) {
  std::vector<double> cls;
  for (double cl = 120.0; cl <= 160.0; cl += 2.5) cls.push_back(cl);
  std::vector<Scenario> runs;
  std::vector<std::pair<double, double>> keys;
  for (double v : values)
    for (double cl : cls)
      for (auto seed : seed_list(o)) {
        Scenario sc = coverage_scenario(cl, seed);
        set(sc, v);
        apply(sc, o);
        runs.push_back(sc);
        keys.emplace_back(v, cl);
      }
  const auto out = run_batch(runs, o.threads);
  PresetResult r{name, "", nlohmann::json::object(), ""};
  r.csv = knob + ",coupling_loss_db,seed,residual_bler,initial_bler,user_experienced_throughput_bps,mean_latency_ms\n";
  std::map<std::pair<double, double>, std::vector<const RunOutput*>> pooled;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const AggregateKpi a = out[i].report.aggregate();
    r.csv += num(keys[i].first) + "," + num(keys[i].second) + "," + std::to_string(runs[i].seed) + "," +
             num(a.residual_bler) + "," + num(a.initial_bler) + "," + num(a.user_experienced_throughput_bps) + "," +
             num(a.mean_latency_ms) + "\n";
    pooled[keys[i]].push_back(&out[i]);
  }
  for (double v : values) {
    // Coverage: largest swept loss up to which every point keeps residual BLER within 2%.
    double coverage = 0.0;
    for (double cl : cls) {
      if (pooled_residual(pooled[{v, cl}]) > 0.02) break;
      coverage = cl;
    }
    r.summary["coverage_db"][num(v)] = coverage;
    r.text += "  " + knob + " " + num(v) + ": coverage " + num(coverage) + " dB\n";
  }
  return r;
}

PresetResult fig4c(const PresetOptions& o) {
  return coverage_sweep(o, "fig4c", "p0_dbm", {-110, -105, -100, -95, -90},
                        [](Scenario& sc, double v) { sc.ue_groups[0].power_control.p0_dbm = v; });
}

PresetResult fig4d(const PresetOptions& o) {
  return coverage_sweep(o, "fig4d", "initial_mcs", {2, 4, 6, 8, 10},
                        [](Scenario& sc, double v) { sc.scheduler.initial_mcs = static_cast<int>(v); });
}

// --- table2 ------------------------------------------------------------------

PresetResult table2(const PresetOptions&) {
  const auto rows = table2_rows(radio::BlerModel::builtin(), TbsTable::builtin());
  PresetResult r{"table2", "", nlohmann::json::object(), ""};
  r.csv = "rl_pusch,rl_mpdcch,harq_cycle_ms,aggregation,tbs_bits,mcs,feasible,mcl_db\n";
  for (const auto& row : rows) {
    r.csv += std::to_string(row.rl_pusch) + "," + std::to_string(row.rl_mpdcch) + "," +
             std::to_string(row.harq_cycle_ms) + "," + std::to_string(row.aggregation) + "," +
             std::to_string(row.tbs_bits) + "," + std::to_string(row.mcs) + "," + (row.feasible ? "1" : "0") + "," +
             num(row.mcl_db) + "\n";
    r.summary["mcl_db"][std::to_string(row.rl_pusch)] = row.mcl_db;
    char line[128];
    std::snprintf(line, sizeof line, "  PUSCH RL %2d: cycle %d ms, k=%d, TBS %d, MCS %d, MCL %.1f dB\n", row.rl_pusch,
                  row.harq_cycle_ms, row.aggregation, row.tbs_bits, row.mcs, row.mcl_db);
    r.text += line;
  }
  return r;
}

// --- voip --------------------------------------------------------------------

PresetResult voip(const PresetOptions& o) {
  std::vector<Scenario> runs;
  for (bool agg : {true, false})
    for (auto seed : seed_list(o)) {
      runs.push_back(voip_scenario(seed, agg));
      apply(runs.back(), o);
    }
  const auto out = run_batch(runs, o.threads);
  PresetResult r{"voip", "", nlohmann::json::object(), ""};
  r.csv = "aggregation,seed,budget_violation_rate,latency_p50_ms,latency_p95_ms,latency_p99_ms,residual_bler,"
          "mpdcch_utilization,ul_prb_utilization,dl_prb_utilization\n";
  std::map<bool, std::vector<double>> viol;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const AggregateKpi a = out[i].report.aggregate();
    const bool agg = runs[i].scheduler.voip_aggregation;
    r.csv += std::string(agg ? "1" : "0") + "," + std::to_string(runs[i].seed) + "," + num(a.budget_violation_rate) +
             "," + num(a.latency_ms.p50) + "," + num(a.latency_ms.p95) + "," + num(a.latency_ms.p99) + "," +
             num(a.residual_bler) + "," + num(a.mpdcch_utilization) + "," + num(a.ul_prb_utilization) + "," +
             num(a.dl_prb_utilization) + "\n";
    viol[agg].push_back(a.budget_violation_rate);
  }
  for (bool agg : {true, false}) {
    r.summary["budget_violation_rate"][agg ? "aggregation" : "no_aggregation"] = mean(viol[agg]);
    r.text += std::string("  aggregation ") + (agg ? "on " : "off") + ": budget violation rate " +
              num(mean(viol[agg])) + "\n";
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig3", "fig4a", "fig4b", "fig4c", "fig4d", "table2", "voip"};
  return names;
}

PresetResult run_preset(const std::string& name, const PresetOptions& o) {
  if (name == "fig3") return fig3(o);
  if (name == "fig4a") return fig4a(o);
  if (name == "fig4b") return fig4b(o);
  if (name == "fig4c") return fig4c(o);
  if (name == "fig4d") return fig4d(o);
  if (name == "table2") return table2(o);
  if (name == "voip") return voip(o);
  std::string all;
  for (const auto& n : preset_names()) all += (all.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (expected one of " + all + ")");
}

Scenario fig3_scenario(double coupling_loss_db, int rl_pdsch, std::uint64_t seed) {
  Scenario sc;
  sc.name = "fig3";
  sc.seed = seed;
  sc.duration_ms = 120000;
  sc.layout.rings = 0;
  sc.layout.sectors = 1;
  sc.scheduler.initial_mcs = 10;
  UeGroup g;
  g.name = "single";
  g.count = 1;
  g.coupling_loss_db = coupling_loss_db;
  g.adaptive_rl = false;
  g.ce = ue::CeConfig{4, 8, rl_pdsch, 8};
  g.traffic.kind = TrafficKind::Bursty;
  g.traffic.bursty.direction = Direction::Downlink;
  sc.ue_groups = {g};
  return sc;
}

Scenario bursty_cell_scenario(std::uint64_t seed) {
  Scenario sc;
  sc.name = "bursty-cell";
  sc.seed = seed;
  sc.duration_ms = 300000;
  sc.layout.rings = 0;
  sc.layout.sectors = 3;
  UeGroup g;
  g.name = "mtc";
  g.count = 30;
  g.traffic.kind = TrafficKind::Bursty;
  g.traffic.bursty.direction = Direction::Uplink;
  g.dormancy_ms = 2000;
  sc.ue_groups = {g};
  return sc;
}

Scenario coverage_scenario(double coupling_loss_db, std::uint64_t seed) {
  Scenario sc;
  sc.name = "coverage";
  sc.seed = seed;
  sc.duration_ms = 120000;
  sc.layout.rings = 0;
  sc.layout.sectors = 1;
  UeGroup g;
  g.name = "edge";
  g.count = 10;
  g.coupling_loss_db = coupling_loss_db;
  g.traffic.kind = TrafficKind::Bursty;
  g.traffic.bursty.direction = Direction::Uplink;
  sc.ue_groups = {g};
  return sc;
}

Scenario mixed_scenario(std::uint64_t seed) {
  Scenario sc;
  sc.name = "mixed";
  sc.seed = seed;
  sc.duration_ms = 60000;
  sc.layout.rings = 1;
  sc.layout.sectors = 3;
  UeGroup b;
  b.name = "bursty";
  b.count = 25;
  b.traffic.kind = TrafficKind::Bursty;
  UeGroup v;
  v.name = "voip";
  v.count = 25;
  v.traffic.kind = TrafficKind::Voip;
  sc.ue_groups = {b, v};
  return sc;
}

Scenario voip_scenario(std::uint64_t seed, bool aggregation) {
  Scenario sc;
  sc.name = "voip";
  sc.seed = seed;
  sc.duration_ms = 60000;
  sc.layout.rings = 1;
  sc.layout.sectors = 3;
  sc.scheduler.voip_aggregation = aggregation;
  UeGroup v;
  v.name = "voip";
  v.count = 42;
  v.traffic.kind = TrafficKind::Voip;
  sc.ue_groups = {v};
  return sc;
}

std::vector<Table2Row> table2_rows(const radio::BlerModel& bler, const TbsTable& tbs, const std::vector<int>& rls,
                                   double budget_ms) {
  constexpr int kMpdcchRl = 4;
  constexpr int kVoiceBits = 320;
  constexpr double kVoicePeriodMs = 20.0;
  std::vector<Table2Row> rows;
  for (int rl : rls) {
    Table2Row row;
    row.rl_pusch = rl;
    row.rl_mpdcch = kMpdcchRl;
    row.harq_cycle_ms = harq_cycle_ms(Direction::Uplink, kMpdcchRl, rl, 1);
    row.aggregation = std::max(1, static_cast<int>(std::ceil(row.harq_cycle_ms / kVoicePeriodMs)));
    row.tbs_bits = kVoiceBits * row.aggregation;
    for (int mcs = 0; mcs < TbsTable::kNumMcs; ++mcs) {
      radio::CoverageQuery q;
      q.direction = Direction::Uplink;
      q.rl_mpdcch = kMpdcchRl;
      q.rl_data = rl;
      q.rl_ack = 1;
      q.tbs_bits = row.tbs_bits;
      q.mcs = mcs;
      q.tx_power_dbm = 20.0;
      q.delay_budget_ms = budget_ms;
      q.tb_interarrival_ms = kVoicePeriodMs * row.aggregation;
      q.formation_wait_ms = kVoicePeriodMs * (row.aggregation - 1);
      const auto res = radio::mcl_search(q, bler, tbs);
      if (res.feasible && (!row.feasible || res.mcl_db > row.mcl_db)) {
        row.feasible = true;
        row.mcl_db = res.mcl_db;
        row.mcs = mcs;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace catm::sim
