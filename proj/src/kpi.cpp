#include "catm/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace catm::sim {

namespace {

double nearest_rank(const std::vector<double>& sorted, double p) {
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt(std::int64_t v) { return std::to_string(v); }

}  // namespace

LatencyPercentiles percentiles(std::vector<double> samples) {
  if (samples.empty()) return {};
  std::sort(samples.begin(), samples.end());
  return {nearest_rank(samples, 50), nearest_rank(samples, 95), nearest_rank(samples, 99)};
}

AggregateKpi KpiReport::aggregate() const {
  AggregateKpi a;
  std::vector<double> lat;
  double rate_sum = 0.0, tput_sum = 0.0, lat_sum = 0.0;
  std::int64_t first = 0, first_fail = 0, tb_done = 0, tb_fail = 0, voip = 0, violated = 0;
  const double seconds = duration_ms / 1000.0;
  for (const UeKpi& u : ues) {
    if (!u.measured) continue;
    ++a.ues;
    a.offered_packets += u.offered_packets;
    a.delivered_packets += u.delivered_packets;
    a.dropped_packets += u.dropped_packets;
    a.in_flight_packets += u.in_flight_packets;
    a.offered_bits += u.offered_bits;
    a.delivered_bits += u.delivered_bits;
    lat.insert(lat.end(), u.latencies_ms.begin(), u.latencies_ms.end());
    for (double l : u.latencies_ms) lat_sum += l;
    rate_sum += u.experienced_rate_sum_bps;
    tput_sum += ratio(static_cast<double>(u.delivered_bits), seconds);
    first += u.tb_first_attempts;
    first_fail += u.tb_first_failures;
    tb_done += u.tb_completed;
    tb_fail += u.tb_failed;
    voip += u.voip_packets;
    violated += u.budget_violations;
    a.rach_attempts += u.rach_attempts;
    a.rach_overhead_prb_ttis += u.rach_overhead_prb_ttis;
    if (u.coverage_limited_grants > 0) ++a.coverage_limited_ues;
  }
  a.throughput_bps = ratio(static_cast<double>(a.delivered_bits), seconds);
  a.mean_ue_throughput_bps = ratio(tput_sum, a.ues);
  a.user_experienced_throughput_bps = ratio(rate_sum, static_cast<double>(lat.size()));
  a.mean_latency_ms = ratio(lat_sum, static_cast<double>(lat.size()));
  a.latency_ms = percentiles(std::move(lat));
  a.residual_bler = ratio(static_cast<double>(tb_fail), static_cast<double>(tb_done));
  a.initial_bler = ratio(static_cast<double>(first_fail), static_cast<double>(first));
  a.budget_violation_rate = ratio(static_cast<double>(violated), static_cast<double>(voip));

  double ttis = 0, dl = 0, ul = 0, pd = 0, nb = 0, cap = 0;
  for (const CellKpi& c : cells) {
    if (!c.measured) continue;
    ttis += static_cast<double>(c.usage.ttis);
    dl += static_cast<double>(c.usage.dl_prb_ttis);
    ul += static_cast<double>(c.usage.ul_prb_ttis);
    pd += static_cast<double>(c.usage.mpdcch_unit_ttis);
    nb += static_cast<double>(c.usage.ttis) * c.narrowband_prbs;
    cap += static_cast<double>(c.usage.ttis) * c.mpdcch_capacity;
    a.max_mpdcch_units_in_tti = std::max(a.max_mpdcch_units_in_tti, c.usage.max_mpdcch_units_in_tti);
  }
  a.dl_prb_utilization = ratio(dl, nb);
  a.ul_prb_utilization = ratio(ul, nb);
  a.mpdcch_utilization = ratio(pd, cap);
  return a;
}

const std::vector<std::string>& kpi_csv_columns() {
  static const std::vector<std::string> cols{
      "ue_id", "group", "cell", "measured", "coupling_loss_db", "offered_packets", "delivered_packets",
      "dropped_packets", "in_flight_packets", "budget_violations", "offered_bits", "delivered_bits",
      "throughput_bps", "user_experienced_throughput_bps", "latency_p50_ms", "latency_p95_ms", "latency_p99_ms",
      "residual_bler", "initial_bler", "transmissions", "grants", "rach_attempts", "rach_overhead_prb_ttis",
      "coverage_limited_grants"};
  return cols;
}

std::string kpi_csv(const KpiReport& r) {
  std::string out;
  const auto& cols = kpi_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  const double seconds = r.duration_ms / 1000.0;
  for (const UeKpi& u : r.ues) {
    const auto p = percentiles(u.latencies_ms);
    const double n = static_cast<double>(u.latencies_ms.size());
    const std::vector<std::string> row{
        fmt(std::int64_t{u.ue_id}), fmt(std::int64_t{u.group}), fmt(std::int64_t{u.cell}), u.measured ? "1" : "0",
        fmt(u.coupling_loss_db), fmt(u.offered_packets), fmt(u.delivered_packets), fmt(u.dropped_packets),
        fmt(u.in_flight_packets), fmt(u.budget_violations), fmt(u.offered_bits), fmt(u.delivered_bits),
        fmt(ratio(static_cast<double>(u.delivered_bits), seconds)), fmt(ratio(u.experienced_rate_sum_bps, n)),
        fmt(p.p50), fmt(p.p95), fmt(p.p99),
        fmt(ratio(static_cast<double>(u.tb_failed), static_cast<double>(u.tb_completed))),
        fmt(ratio(static_cast<double>(u.tb_first_failures), static_cast<double>(u.tb_first_attempts))),
        fmt(u.transmissions), fmt(u.grants), fmt(u.rach_attempts), fmt(u.rach_overhead_prb_ttis),
        fmt(u.coverage_limited_grants)};
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += '\n';
  }
  const AggregateKpi a = r.aggregate();
  std::int64_t violations = 0, transmissions = 0, grants = 0, cov = 0;
  for (const UeKpi& u : r.ues)
    if (u.measured) {
      violations += u.budget_violations;
      transmissions += u.transmissions;
      grants += u.grants;
      cov += u.coverage_limited_grants;
    }
  const std::vector<std::string> all{"all", "", "", "1", "", fmt(a.offered_packets), fmt(a.delivered_packets),
                                     fmt(a.dropped_packets), fmt(a.in_flight_packets), fmt(violations),
                                     fmt(a.offered_bits), fmt(a.delivered_bits), fmt(a.throughput_bps),
                                     fmt(a.user_experienced_throughput_bps), fmt(a.latency_ms.p50),
                                     fmt(a.latency_ms.p95), fmt(a.latency_ms.p99), fmt(a.residual_bler),
                                     fmt(a.initial_bler), fmt(transmissions), fmt(grants), fmt(a.rach_attempts),
                                     fmt(a.rach_overhead_prb_ttis), fmt(cov)};
  for (std::size_t i = 0; i < all.size(); ++i) out += (i ? "," : "") + all[i];
  out += '\n';
  return out;
}

nlohmann::json summary_json(const KpiReport& r) {
  const AggregateKpi a = r.aggregate();
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["duration_ms"] = r.duration_ms;
  j["aggregate"] = {
      {"ues", a.ues},
      {"offered_packets", a.offered_packets},
      {"delivered_packets", a.delivered_packets},
      {"dropped_packets", a.dropped_packets},
      {"in_flight_packets", a.in_flight_packets},
      {"offered_bits", a.offered_bits},
      {"delivered_bits", a.delivered_bits},
      {"throughput_bps", a.throughput_bps},
      {"mean_ue_throughput_bps", a.mean_ue_throughput_bps},
      {"user_experienced_throughput_bps", a.user_experienced_throughput_bps},
      {"latency_ms", {{"mean", a.mean_latency_ms}, {"p50", a.latency_ms.p50}, {"p95", a.latency_ms.p95},
                      {"p99", a.latency_ms.p99}}},
      {"residual_bler", a.residual_bler},
      {"initial_bler", a.initial_bler},
      {"budget_violation_rate", a.budget_violation_rate},
      {"dl_prb_utilization", a.dl_prb_utilization},
      {"ul_prb_utilization", a.ul_prb_utilization},
      {"mpdcch_utilization", a.mpdcch_utilization},
      {"max_mpdcch_units_in_tti", a.max_mpdcch_units_in_tti},
      {"rach_attempts", a.rach_attempts},
      {"rach_overhead_prb_ttis", a.rach_overhead_prb_ttis},
      {"coverage_limited_ues", a.coverage_limited_ues},
  };
  j["config"] = r.config;
  return j;
}

std::string summary_text(const KpiReport& r) {
  const AggregateKpi a = r.aggregate();
  std::string s;
  char line[256];
  auto add = [&](const char* label, const std::string& value) {
    std::snprintf(line, sizeof line, "  %-34s %s\n", label, value.c_str());
    s += line;
  };
  s += "scenario " + r.scenario + "  seed " + std::to_string(r.seed) + "  duration " +
       std::to_string(r.duration_ms) + " ms\n";
  add("measured UEs", fmt(std::int64_t{a.ues}));
  add("packets offered/delivered/dropped", fmt(a.offered_packets) + " / " + fmt(a.delivered_packets) + " / " +
                                               fmt(a.dropped_packets));
  add("packets in flight at end", fmt(a.in_flight_packets));
  add("throughput (bit/s)", fmt(a.throughput_bps));
  add("mean UE throughput (bit/s)", fmt(a.mean_ue_throughput_bps));
  add("user-experienced throughput (bit/s)", fmt(a.user_experienced_throughput_bps));
  add("latency mean/p50/p95/p99 (ms)", fmt(a.mean_latency_ms) + " / " + fmt(a.latency_ms.p50) + " / " +
                                           fmt(a.latency_ms.p95) + " / " + fmt(a.latency_ms.p99));
  add("residual BLER", fmt(a.residual_bler));
  add("initial BLER", fmt(a.initial_bler));
  add("VoIP budget violation rate", fmt(a.budget_violation_rate));
  add("PRB utilization DL/UL", fmt(a.dl_prb_utilization) + " / " + fmt(a.ul_prb_utilization));
  add("MPDCCH utilization (max units/TTI)", fmt(a.mpdcch_utilization) + " (" + fmt(a.max_mpdcch_units_in_tti) + ")");
  add("RACH attempts (overhead PRB-TTIs)", fmt(a.rach_attempts) + " (" + fmt(a.rach_overhead_prb_ttis) + ")");
  add("coverage-limited UEs", fmt(std::int64_t{a.coverage_limited_ues}));
  return s;
}

}  // namespace catm::sim
