#pragma once

// Scenario description: everything a run needs, serialisable to and from JSON.
// Unknown keys are rejected with their full path.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catm/link_adaptation.hpp"
#include "catm/mac_scheduler.hpp"
#include "catm/radio_model.hpp"
#include "catm/traffic.hpp"
#include "catm/ue_protocol.hpp"
#include "json.hpp"

namespace catm::sim {

enum class InterferenceMode { Reserved, Shared };
enum class TraceLevel { None, Summary, Full };

struct LayoutConfig {
  int rings = 1;
  double isd_m = 500.0;
  int sectors = 3;
  bool wraparound = false;
  double enb_height_m = 25.0;
  double ue_height_m = 1.5;
  double min_distance_m = radio::kMinDistanceM;
  /// KPIs aggregate only UEs served by the centre site's cells.
  bool measure_center_only = true;
};

struct RadioConfig {
  double carrier_ghz = 2.0;
  double shadow_std_db = 8.0;
  double body_loss_db = 1.0;
  double ue_antenna_gain_db = -3.0;
  double enb_total_power_dbm = 46.02;  // 2 x 20 W
  radio::AntennaPattern antenna;
  /// Path of a BLER table, or "builtin".
  std::string bler_table = "builtin";
  /// Path of a TBS table, or "builtin".
  std::string tbs_table = "builtin";
  InterferenceMode interference = InterferenceMode::Reserved;
  double legacy_load = 0.0;
  /// Uplink interference per PRB received from a fully loaded legacy neighbourhood.
  double legacy_ul_interference_dbm_per_prb = -110.0;
};

struct BandwidthConfig {
  double bandwidth_mhz = 10.0;
  /// -1 picks the least wasteful narrowband.
  int narrowband = -1;
  /// Path of a narrowband layout table, or "builtin".
  std::string layout_table = "builtin";
};

enum class TrafficKind { Bursty, Voip, FullBuffer };

struct TrafficConfig {
  TrafficKind kind = TrafficKind::Bursty;
  traffic::BurstyParams bursty;
  traffic::VoipParams voip;
  traffic::FullBufferParams full_buffer;
};

struct UeGroup {
  std::string name = "group";
  int count = 1;
  TrafficConfig traffic;
  /// Per-channel repetitions; derived from the coupling-loss tier when absent.
  std::optional<ue::CeConfig> ce;
  /// Link adaptation picks the data repetition; false pins it to the CE value.
  bool adaptive_rl = true;
  int dormancy_ms = 2000;
  std::optional<ue::DrxConfig> drx;
  ue::CqiConfig cqi;
  ue::PowerControlState power_control;
  /// Pins the serving-link coupling loss (single-link studies).
  std::optional<double> coupling_loss_db;
  bool start_connected = false;
};

struct ClpcConfig {
  double target_sinr_db = 0.0;
  /// UL receptions in a connection before the first TPC command.
  int min_samples = 10;
  double step_db = 1.0;
  double accum_limit_db = 10.0;
};

struct SchedulerConfig {
  double ibler_target = 0.10;
  double step_up_db = 0.01;
  int initial_mcs = 6;
  mac::AglTiers agl_tiers;
  int max_attempts = 4;
  int harq_processes = 8;
  int rl_cap = kMaxRepetition;
  int max_tbs_bits = 1000;
  bool voip_aggregation = true;
  double voip_delay_budget_ms = 200.0;
  int sr_period_ms = 10;
  ClpcConfig clpc;
};

struct OutputConfig {
  TraceLevel trace = TraceLevel::None;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  std::int64_t duration_ms = 10000;
  LayoutConfig layout;
  RadioConfig radio;
  BandwidthConfig bandwidth;
  std::vector<UeGroup> ue_groups;
  SchedulerConfig scheduler;
  ue::RachConfig rach;
  OutputConfig output;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  int total_ues() const;
};

Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);
/// Fully resolved configuration, every default included.
nlohmann::json to_json(const Scenario& s);

const char* to_string(TrafficKind k);
const char* to_string(InterferenceMode m);
const char* to_string(TraceLevel t);

}  // namespace catm::sim
