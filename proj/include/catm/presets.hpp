#pragma once

// Named experiment presets. Each expands to a batch of scenarios (or coverage
// searches), runs it and renders one CSV table plus a summary.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catm/radio_model.hpp"
#include "catm/scenario.hpp"
#include "catm/tbs_table.hpp"
#include "json.hpp"

namespace catm::sim {

struct PresetOptions {
  int seeds = 5;
  std::uint64_t base_seed = 1;
  std::optional<std::int64_t> duration_ms;
  int threads = 1;
  TraceLevel trace = TraceLevel::None;
};

struct PresetResult {
  std::string name;
  std::string csv;
  nlohmann::json summary;
  std::string text;
};

const std::vector<std::string>& preset_names();

/// Throws ConfigError for an unknown name.
PresetResult run_preset(const std::string& name, const PresetOptions& opts);

// Scenario builders shared by the presets and the acceptance suite.

/// One DL bursty UE at a pinned coupling loss; MPDCCH RL 4, PUCCH RL 8, PDSCH RL fixed.
Scenario fig3_scenario(double coupling_loss_db, int rl_pdsch, std::uint64_t seed);
/// Single three-sector site of UL bursty MTC devices (10 s readings, 2 s dormancy).
Scenario bursty_cell_scenario(std::uint64_t seed);
/// UL bursty devices pinned at one coupling loss, for coverage sweeps.
Scenario coverage_scenario(double coupling_loss_db, std::uint64_t seed);
/// Seven sites, 50 UEs, 60 s, half bursty and half VoIP.
Scenario mixed_scenario(std::uint64_t seed);
/// Seven sites of VoIP users.
Scenario voip_scenario(std::uint64_t seed, bool aggregation);

struct Table2Row {
  int rl_pusch = 8;
  int rl_mpdcch = 4;
  int harq_cycle_ms = 0;
  int aggregation = 1;
  int tbs_bits = 0;
  int mcs = -1;
  double mcl_db = 0.0;
  bool feasible = false;
};

/// MCL per PUSCH repetition under the VoIP delay budget with aggregation; the MCS
/// is the coverage-optimal one for the aggregated block.
std::vector<Table2Row> table2_rows(const radio::BlerModel& bler, const TbsTable& tbs,
                                   const std::vector<int>& rls = {8, 16, 32}, double budget_ms = 200.0);

}  // namespace catm::sim
