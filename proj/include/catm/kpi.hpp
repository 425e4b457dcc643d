#pragma once

// Per-UE and aggregate KPIs, and their CSV / JSON / text renderings.

#include <cstdint>
#include <string>
#include <vector>

#include "catm/resource_grid.hpp"
#include "json.hpp"

namespace catm::sim {

struct UeKpi {
  int ue_id = 0;
  int group = 0;
  int cell = 0;
  double coupling_loss_db = 0.0;
  /// Counted in the aggregate (centre-site UEs unless configured otherwise).
  bool measured = true;

  std::int64_t offered_packets = 0;
  std::int64_t delivered_packets = 0;
  std::int64_t dropped_packets = 0;  // HARQ exhausted or budget violated
  std::int64_t in_flight_packets = 0;
  std::int64_t budget_violations = 0;
  std::int64_t voip_packets = 0;
  std::int64_t offered_bits = 0;
  std::int64_t delivered_bits = 0;

  /// Latency of each delivered packet in ms (arrival to decode), delivery order.
  std::vector<double> latencies_ms;
  /// Sum over delivered packets of bits / latency.
  double experienced_rate_sum_bps = 0.0;

  std::int64_t tb_first_attempts = 0;
  std::int64_t tb_first_failures = 0;
  std::int64_t tb_completed = 0;
  std::int64_t tb_failed = 0;
  std::int64_t transmissions = 0;

  std::int64_t rach_attempts = 0;
  std::int64_t rach_overhead_prb_ttis = 0;
  std::int64_t coverage_limited_grants = 0;
  std::int64_t grants = 0;
};

struct CellKpi {
  int cell = 0;
  bool measured = true;
  grid::GridUsage usage;
  int narrowband_prbs = grid::kNarrowbandPrbs;
  int mpdcch_capacity = grid::kMpdcchPoolUnits;
};

struct LatencyPercentiles {
  double p50 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
};

/// Nearest-rank percentiles; zeros for an empty sample.
LatencyPercentiles percentiles(std::vector<double> samples);

struct AggregateKpi {
  int ues = 0;
  std::int64_t offered_packets = 0;
  std::int64_t delivered_packets = 0;
  std::int64_t dropped_packets = 0;
  std::int64_t in_flight_packets = 0;
  std::int64_t offered_bits = 0;
  std::int64_t delivered_bits = 0;
  double throughput_bps = 0.0;           // all measured UEs together
  double mean_ue_throughput_bps = 0.0;
  double user_experienced_throughput_bps = 0.0;  // mean over delivered packets of bits / latency
  LatencyPercentiles latency_ms;
  double mean_latency_ms = 0.0;
  double residual_bler = 0.0;
  double initial_bler = 0.0;
  double budget_violation_rate = 0.0;
  double dl_prb_utilization = 0.0;
  double ul_prb_utilization = 0.0;
  double mpdcch_utilization = 0.0;
  std::int64_t max_mpdcch_units_in_tti = 0;
  std::int64_t rach_attempts = 0;
  std::int64_t rach_overhead_prb_ttis = 0;
  int coverage_limited_ues = 0;
};

struct KpiReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::int64_t duration_ms = 0;
  std::vector<UeKpi> ues;
  std::vector<CellKpi> cells;
  /// Fully resolved scenario.
  nlohmann::json config;

  AggregateKpi aggregate() const;
};

/// One header line plus one row per UE and a final "all" row.
std::string kpi_csv(const KpiReport& r);
std::string summary_text(const KpiReport& r);
nlohmann::json summary_json(const KpiReport& r);

/// Column names of kpi_csv, in order.
const std::vector<std::string>& kpi_csv_columns();

}  // namespace catm::sim
