#pragma once

// eNB MAC: grant timelines under half-duplex, HARQ concurrency limits, link
// adaptation, VoIP aggregation and the per-TTI grant commit loop.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "catm/common.hpp"
#include "catm/harq_timing.hpp"
#include "catm/link_adaptation.hpp"
#include "catm/radio_model.hpp"
#include "catm/resource_grid.hpp"
#include "catm/tbs_table.hpp"
#include "catm/ue_protocol.hpp"

namespace catm::mac {

struct TtiRange {
  Tti first = 0;
  int count = 0;
  Tti last() const { return first + count - 1; }
  Tti end() const { return first + count; }
  bool empty() const { return count == 0; }
  bool operator==(const TtiRange&) const = default;
};

struct Timeline {
  TtiRange mpdcch;
  TtiRange data;
  TtiRange ack;  // DL only: PUCCH HARQ-ACK
  /// Earliest MPDCCH start for the next grant of the same HARQ process.
  Tti next_eligible = 0;
};

struct TimelineParams {
  Direction direction = Direction::Uplink;
  int rl_mpdcch = 1;
  int rl_data = 1;
  int rl_ack = 1;
};

/// UL: MPDCCH [n, n+Rm), PUSCH 4 after the last MPDCCH subframe, next grant 4
/// after the last PUSCH subframe. DL: PDSCH 2 after MPDCCH, PUCCH 4 after PDSCH,
/// next grant 4 after PUCCH. Throws ConfigError for off-ladder repetitions.
Timeline derive_timeline(const TimelineParams& p, Tti start_tti);

/// Largest number of HARQ processes that can each repeat every `period_ms`
/// (stretched to the process's own cycle when that is longer) without
/// calendar conflicts. Exhaustive search with rotation symmetry removed.
int max_concurrent_harq(int rl_mpdcch, int rl_data, int rl_ack, Direction dir, int period_ms,
                        bool full_duplex = false);

/// AGL by coupling-loss tier: <130 dB -> 4, <140 -> 8, <150 -> 16, else 24.
struct AglTiers {
  std::vector<double> upper_bounds_db{130.0, 140.0, 150.0};
  std::vector<int> levels{4, 8, 16, 24};
  int agl_for(double coupling_loss_db) const;
  void validate() const;
};

/// What the eNB knows about one link when choosing a transmission format.
struct LinkQuality {
  Direction direction = Direction::Uplink;
  double coupling_loss_db = 0.0;
  double interference_dbm = -200.0;
  /// UL: UE power control; DL: ignored.
  ue::PowerControlState ue_pc;
  /// DL: eNB transmit power per PRB.
  double enb_power_per_prb_dbm = 0.0;
  /// Per-transmission SINR over `n_prbs` PRBs.
  double sinr_db(int n_prbs) const;
  double tx_power_dbm(int n_prbs) const;
};

struct SelectionOptions {
  int rl_cap = kMaxRepetition;
  /// Forces the data repetition length (RL sweeps).
  std::optional<int> fixed_rl;
  /// No SINR estimate yet: use la.initial_mcs at `fixed_rl` or `fallback_rl`.
  bool use_initial_mcs = false;
  int fallback_rl = 8;
};

struct TransmissionChoice {
  int mcs = 0;
  int n_prbs = 1;
  int tbs_bits = 0;
  int rl_data = 1;
  double predicted_bler = 1.0;
  bool coverage_limited = false;
};

/// Lowest repetition length with a format whose predicted first-attempt BLER at
/// (SINR + OLLA offset) meets the target. Within that length the lowest MCS
/// carrying the whole queue (capped at max TBS) wins, else the largest TBS.
TransmissionChoice select_transmission(const LinkQuality& link, const LinkAdaptationState& la, int queue_bits,
                                       const radio::BlerModel& bler, const TbsTable& tbs,
                                       const SelectionOptions& opts = {});

/// Predicted first-attempt BLER of one format on `link`.
double predict_bler(const LinkQuality& link, double olla_offset_db, int mcs, int n_prbs, int rl_data,
                    const radio::BlerModel& bler, const TbsTable& tbs);

// ---------------------------------------------------------------------------
// VoIP

struct VoipPacket {
  std::int64_t id = 0;
  Tti arrival_tti = 0;
  int size_bits = 320;
  bool sid = false;
};

struct VoipBuildConfig {
  TimelineParams rl;
  double delay_budget_ms = 200.0;
  int voice_period_ms = 20;
  int max_tbs_bits = 1000;
  bool aggregation = true;
};

struct TransportBlockPlan {
  std::vector<std::int64_t> packet_ids;
  int size_bits = 0;
  /// Segment index and count when the aggregate was split.
  int segment = 0;
  int segments = 1;
};

struct VoipBuild {
  int aggregation_factor = 1;
  std::vector<TransportBlockPlan> blocks;
  /// Packets that cannot meet the delay budget even if sent now.
  std::vector<std::int64_t> budget_violated;
  bool ready = false;  // enough packets aggregated (or the oldest one cannot wait)
};

/// k = max(1, ceil(harq_cycle / voice_period)).
int voip_aggregation_factor(const TimelineParams& rl, int voice_period_ms);

/// Groups up to k queued packets into one block; splits into equal segments when
/// the aggregate exceeds max TBS. Packets that would finish past the budget are
/// reported as violated and left out.
VoipBuild voip_build(std::span<const VoipPacket> queue, const VoipBuildConfig& cfg, Tti now);

// ---------------------------------------------------------------------------
// Grant commit and per-TTI scheduling

enum class GrantKind : std::uint8_t { Data, RachResponse };

struct Grant {
  int ue_id = -1;
  GrantKind kind = GrantKind::Data;
  Direction direction = Direction::Uplink;
  int harq_process = -1;
  int mcs = 0;
  int tbs_bits = 0;
  int n_prbs = 0;
  int agl = 4;
  int rl_mpdcch = 1;
  int rl_data = 1;
  int rl_ack = 1;
  grid::PrbRange prbs;
  Timeline timeline;
  grid::ReservationId reservation = 0;
};

struct GrantRequest {
  int ue_id = -1;
  GrantKind kind = GrantKind::Data;
  Direction direction = Direction::Uplink;
  int harq_process = -1;
  int mcs = 0;
  int tbs_bits = 0;
  int n_prbs = 1;
  int agl = 4;
  int rl_mpdcch = 1;
  int rl_data = 1;
  int rl_ack = 1;
};

enum class CommitFailure { None, MpdcchPool, Prbs, HalfDuplex, Horizon };

struct CommitResult {
  std::optional<Grant> grant;
  CommitFailure failure = CommitFailure::None;
};

/// Books the grant's whole timeline in the cell grid and the UE calendar, or nothing.
CommitResult commit_grant(const GrantRequest& req, Tti start_tti, grid::ResourceGrid& grid,
                          ue::HalfDuplexCalendar& calendar);

/// Priority classes, highest first.
enum class Priority : std::uint8_t { HarqRetransmission = 0, AccessResponse = 1, Voip = 2, Bursty = 3 };

struct Candidate {
  Priority priority = Priority::Bursty;
  /// Ordering key inside the class: VoIP by remaining budget slack (ascending),
  /// bursty by round-robin position (ascending).
  double order_key = 0.0;
  GrantRequest request;
  ue::HalfDuplexCalendar* calendar = nullptr;
};

struct ScheduleStats {
  int attempted = 0;
  int committed = 0;
  int blocked_mpdcch = 0;
  int blocked_prbs = 0;
  int blocked_half_duplex = 0;
};

/// Commits candidates in priority order; each is booked atomically or skipped.
std::vector<Grant> schedule_tti(std::vector<Candidate> candidates, grid::ResourceGrid& grid, Tti tti,
                                ScheduleStats* stats = nullptr);

}  // namespace catm::mac
