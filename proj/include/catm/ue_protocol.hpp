#pragma once

// Per-UE state: RRC connection with dormancy timer, DRX, simplified RACH,
// half-duplex calendar and uplink power control.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catm/common.hpp"
#include "catm/link_adaptation.hpp"

namespace catm::ue {

enum class Slot : std::uint8_t { Free, Tx, Rx, Guard };
const char* to_string(Slot s);

struct HalfDuplexConflict {
  Tti tti = 0;
  Slot booked = Slot::Free;
};

/// Half-duplex booking calendar over a sliding window. TX and RX never share a
/// TTI, and one free TTI must separate opposite directions.
class HalfDuplexCalendar {
 public:
  explicit HalfDuplexCalendar(int horizon_ttis = 4096, bool full_duplex = false);

  /// Books [first, first + count) in `dir` atomically; returns the first blocking TTI otherwise.
  std::optional<HalfDuplexConflict> book(Tti first, int count, Direction dir);
  /// Dry run of book().
  std::optional<HalfDuplexConflict> check(Tti first, int count, Direction dir) const;
  void unbook(Tti first, int count, Direction dir);

  /// TX/RX when booked, GUARD when free but bordering a booking, FREE otherwise.
  Slot state(Tti tti) const;
  bool full_duplex() const { return full_duplex_; }

  void advance_to(Tti tti);
  Tti now() const { return now_; }
  /// Throws InvariantBreach on TX+RX overlap or a missing guard.
  void audit() const;

 private:
  struct Cell {
    std::uint8_t tx = 0;
    std::uint8_t rx = 0;
  };
  const Cell& at(Tti t) const { return cells_[static_cast<std::size_t>(t % horizon_)]; }
  Cell& at(Tti t) { return cells_[static_cast<std::size_t>(t % horizon_)]; }
  bool in_window(Tti t) const { return t >= now_ && t < now_ + horizon_; }

  int horizon_;
  bool full_duplex_;
  Tti now_ = 0;
  std::vector<Cell> cells_;
};

enum class PowerControlMode { Olpc, Clpc };

struct PowerControlState {
  double p_max_dbm = 20.0;
  double p0_dbm = -100.0;
  double alpha = 1.0;
  double tpc_accum_db = 0.0;
  PowerControlMode mode = PowerControlMode::Olpc;

  void validate() const;
  bool operator==(const PowerControlState&) const = default;
};

/// min(p_max, p0 + 10 log10(n_prbs) + alpha * CL + tpc); tpc ignored in OLPC mode.
double tx_power(const PowerControlState& pc, double coupling_loss_db, int n_prbs);

struct DrxConfig {
  int cycle_ms = 1280;
  int on_duration_ms = 10;
  /// Active time extension after the last scheduling activity.
  int inactivity_ms = 0;
  void validate() const;
};

struct RachConfig {
  int preamble_repetitions = 1;
  int rar_window_ms = 3;      // preamble end -> RAR grant may start
  int contention_ms = 10;     // RAR reception -> connected (msg3/msg4)
  int backoff_ms = 20;
  double cl50_db = 145.0;     // 50% preamble detection at one repetition
  double slope_db = 2.0;
  int prach_prbs = 6;
  void validate() const;
  /// Preamble detection probability at `coupling_loss_db`.
  double success_probability(double coupling_loss_db) const;
};

enum class RachOutcome { Success, Retry };

struct RachAttempt {
  Tti start_tti = 0;
  int preamble_repetitions = 1;
  RachOutcome outcome = RachOutcome::Retry;
  double latency_ms = 0.0;
  std::int64_t overhead_prb_ttis = 0;
};

/// Overhead of one preamble transmission: PRACH PRBs times repetitions.
std::int64_t rach_overhead(const RachConfig& cfg);

enum class RrcState { Idle, Connected };
const char* to_string(RrcState s);

enum class CqiMode { Periodic, AperiodicOnPusch };

struct CqiConfig {
  CqiMode mode = CqiMode::Periodic;
  /// 20, 40, 80 or 0 for never.
  int period_ms = 80;
  void validate() const;
};

/// Per-channel repetition lengths of the UE's coverage tier.
struct CeConfig {
  int rl_mpdcch = 4;
  int rl_pusch = 8;
  int rl_pdsch = 8;
  int rl_pucch = 8;
  void validate() const;
};

struct RrcEvents {
  bool data_arrival = false;   // new UL or DL payload for this UE
  bool data_activity = false;  // any grant, transmission or reception
  bool rach_complete = false;  // contention resolution finished
};

struct RrcStep {
  bool rach_initiated = false;
  Tti rach_start_tti = 0;
  bool connected = false;
  bool released = false;
  bool mpdcch_monitoring = false;
};

struct UeContext {
  int ue_id = 0;
  RrcState rrc_state = RrcState::Idle;
  int dormancy_timer_ms = 2000;
  std::optional<DrxConfig> drx;
  CqiConfig cqi;
  CeConfig ce;
  PowerControlState pc;
  PowerControlState pc_initial;
  mac::LinkAdaptationState la;
  mac::LinkAdaptationState la_initial;
  HalfDuplexCalendar calendar;

  bool rach_pending = false;
  Tti last_activity_tti = 0;

  UeContext(int id, const PowerControlState& pc0, const mac::LinkAdaptationState& la0, bool full_duplex = false);

  /// True when the UE monitors MPDCCH at `tti` (connected and inside DRX active time).
  bool monitors_mpdcch(Tti tti) const;
  /// First TTI >= `tti` at which the UE monitors MPDCCH (assuming no new activity).
  Tti next_monitoring_tti(Tti tti) const;
};

/// Advances the RRC state machine by one TTI. Releasing the connection restores
/// the power-control and outer-loop states to their initial values.
RrcStep step_rrc(UeContext& ue, Tti tti, const RrcEvents& events);

}  // namespace catm::ue
