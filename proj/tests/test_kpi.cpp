#include <algorithm>
#include <random>
#include <sstream>
#include <string>

#include "catm/kpi.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace catm::sim;

namespace {

KpiReport two_ue_report() {
  KpiReport r;
  r.scenario = "hand";
  r.seed = 1;
  r.duration_ms = 2000;
  UeKpi a;
  a.ue_id = 0;
  a.offered_packets = 4;
  a.delivered_packets = 3;
  a.dropped_packets = 1;
  a.delivered_bits = 3000;
  a.offered_bits = 4000;
  a.latencies_ms = {10.0, 20.0, 40.0};
  a.experienced_rate_sum_bps = 1000.0 / 0.010 + 1000.0 / 0.020 + 1000.0 / 0.040;
  a.tb_completed = 4;
  a.tb_failed = 1;
  a.tb_first_attempts = 4;
  a.tb_first_failures = 2;
  UeKpi b;
  b.ue_id = 1;
  b.offered_packets = 1;
  b.delivered_packets = 1;
  b.delivered_bits = 1000;
  b.offered_bits = 1000;
  b.latencies_ms = {30.0};
  b.experienced_rate_sum_bps = 1000.0 / 0.030;
  b.tb_completed = 1;
  b.tb_first_attempts = 1;
  UeKpi c;  // not measured: must not count
  c.ue_id = 2;
  c.measured = false;
  c.delivered_bits = 99999;
  c.latencies_ms = {1.0};
  r.ues = {a, b, c};
  CellKpi cell;
  cell.usage.ttis = 2000;
  cell.usage.ul_prb_ttis = 1200;
  cell.usage.mpdcch_unit_ttis = 4800;
  cell.usage.max_mpdcch_units_in_tti = 24;
  r.cells = {cell};
  return r;
}

}  // namespace

TEST_SUITE("kpi") {

TEST_CASE("percentiles follow the nearest-rank rule and are ordered") {
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> d(0.05);
  for (int n : {1, 2, 5, 19, 100, 1001}) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = d(rng);
    const auto p = percentiles(v);
    CHECK(p.p50 == oracle::percentile(v, 50));
    CHECK(p.p95 == oracle::percentile(v, 95));
    CHECK(p.p99 == oracle::percentile(v, 99));
    CHECK(p.p50 <= p.p95);
    CHECK(p.p95 <= p.p99);
  }
  const auto e = percentiles({});
  CHECK(e.p99 == 0.0);
}

TEST_CASE("aggregate over measured UEs, hand-computed") {
  const AggregateKpi a = two_ue_report().aggregate();
  CHECK(a.ues == 2);
  CHECK(a.delivered_bits == 4000);
  CHECK(a.throughput_bps == doctest::Approx(2000.0));
  CHECK(a.mean_ue_throughput_bps == doctest::Approx((1500.0 + 500.0) / 2));
  CHECK(a.user_experienced_throughput_bps ==
        doctest::Approx((100000.0 + 50000.0 + 25000.0 + 1000.0 / 0.030) / 4));
  CHECK(a.mean_latency_ms == doctest::Approx(25.0));
  CHECK(a.latency_ms.p50 == 20.0);
  CHECK(a.residual_bler == doctest::Approx(1.0 / 5));
  CHECK(a.initial_bler == doctest::Approx(2.0 / 5));
  CHECK(a.ul_prb_utilization == doctest::Approx(1200.0 / (2000.0 * 6)));
  CHECK(a.mpdcch_utilization == doctest::Approx(4800.0 / (2000.0 * 24)));
  CHECK(a.max_mpdcch_units_in_tti == 24);
}

TEST_CASE("CSV has one row per UE plus the aggregate, all the same width") {
  const std::string csv = kpi_csv(two_ue_report());
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  const auto width = kpi_csv_columns().size();
  while (std::getline(in, line)) {
    CHECK(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1 == width);
    ++rows;
  }
  CHECK(rows == 1 + 3 + 1);
  CHECK(csv.rfind("all,", std::string::npos) != std::string::npos);
}

TEST_CASE("JSON and text summaries carry the headline numbers") {
  const KpiReport r = two_ue_report();
  const auto j = summary_json(r);
  CHECK(j.at("scenario") == "hand");
  CHECK(j.dump().find("user_experienced_throughput_bps") != std::string::npos);
  const std::string t = summary_text(r);
  CHECK(t.find("hand") != std::string::npos);
  CHECK(!t.empty());
}

}
