#include "catm/ue_protocol.hpp"

#include <algorithm>
#include <cmath>

namespace catm::ue {

const char* to_string(Slot s) {
  switch (s) {
    case Slot::Free: return "FREE";
    case Slot::Tx: return "TX";
    case Slot::Rx: return "RX";
    case Slot::Guard: return "GUARD";
  }
  return "?";
}

const char* to_string(RrcState s) { return s == RrcState::Idle ? "IDLE" : "CONNECTED"; }

// ---------------------------------------------------------------------------

HalfDuplexCalendar::HalfDuplexCalendar(int horizon_ttis, bool full_duplex)
    : horizon_(horizon_ttis), full_duplex_(full_duplex), cells_(static_cast<std::size_t>(horizon_ttis)) {
  if (horizon_ttis < 2) throw ConfigError("calendar horizon too small");
}

std::optional<HalfDuplexConflict> HalfDuplexCalendar::check(Tti first, int count, Direction dir) const {
  if (count <= 0) throw InputError("half-duplex booking needs a non-empty TTI range");
  const bool tx = dir == Direction::Uplink;
  for (Tti t = first; t < first + count; ++t) {
    if (!in_window(t)) return HalfDuplexConflict{t, Slot::Guard};
    const Cell& c = at(t);
    if (tx ? c.tx : c.rx) return HalfDuplexConflict{t, tx ? Slot::Tx : Slot::Rx};
    if (full_duplex_) continue;
    if (tx ? c.rx : c.tx) return HalfDuplexConflict{t, tx ? Slot::Rx : Slot::Tx};
    for (Tti n : {t - 1, t + 1}) {
      if (!in_window(n)) continue;
      const Cell& nb = at(n);
      if (tx ? nb.rx : nb.tx) return HalfDuplexConflict{t, Slot::Guard};
    }
  }
  return std::nullopt;
}

std::optional<HalfDuplexConflict> HalfDuplexCalendar::book(Tti first, int count, Direction dir) {
  if (auto c = check(first, count, dir)) return c;
  for (Tti t = first; t < first + count; ++t) (dir == Direction::Uplink ? at(t).tx : at(t).rx) = 1;
  return std::nullopt;
}

void HalfDuplexCalendar::unbook(Tti first, int count, Direction dir) {
  for (Tti t = std::max(first, now_); t < first + count; ++t)
    if (in_window(t)) (dir == Direction::Uplink ? at(t).tx : at(t).rx) = 0;
}

Slot HalfDuplexCalendar::state(Tti tti) const {
  if (!in_window(tti)) return Slot::Free;
  const Cell& c = at(tti);
  if (c.tx) return Slot::Tx;
  if (c.rx) return Slot::Rx;
  for (Tti n : {tti - 1, tti + 1})
    if (in_window(n) && (at(n).tx || at(n).rx)) return Slot::Guard;
  return Slot::Free;
}

void HalfDuplexCalendar::advance_to(Tti tti) {
  for (Tti t = now_; t < tti && t < now_ + horizon_; ++t) at(t) = Cell{};
  if (tti > now_ + horizon_) std::fill(cells_.begin(), cells_.end(), Cell{});
  now_ = std::max(now_, tti);
}

void HalfDuplexCalendar::audit() const {
  if (full_duplex_) return;
  for (Tti t = now_; t < now_ + horizon_; ++t) {
    const Cell& c = at(t);
    CATM_ENSURE(!(c.tx && c.rx), "TX and RX booked in one TTI " + std::to_string(t));
    if (t + 1 < now_ + horizon_) {
      const Cell& n = at(t + 1);
      CATM_ENSURE(!((c.tx && n.rx) || (c.rx && n.tx)), "missing guard between TTI " + std::to_string(t) + " and " +
                                                           std::to_string(t + 1));
    }
  }
}

// ---------------------------------------------------------------------------

void PowerControlState::validate() const {
  if (!(p_max_dbm <= 23.0)) throw ConfigError("p_max_dbm above the Cat-M maximum of 23 dBm");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("power control alpha must lie in [0,1]");
  if (!std::isfinite(p0_dbm)) throw ConfigError("p0_dbm must be finite");
}

double tx_power(const PowerControlState& pc, double coupling_loss_db, int n_prbs) {
  if (n_prbs < 1 || n_prbs > 6) throw ConfigError("tx_power: n_prbs must lie in [1,6] for Cat-M");
  const double tpc = pc.mode == PowerControlMode::Clpc ? pc.tpc_accum_db : 0.0;
  return std::min(pc.p_max_dbm, pc.p0_dbm + 10.0 * std::log10(n_prbs) + pc.alpha * coupling_loss_db + tpc);
}

void DrxConfig::validate() const {
  if (cycle_ms <= 0 || on_duration_ms <= 0 || on_duration_ms > cycle_ms)
    throw ConfigError("DRX needs 0 < on_duration <= cycle");
  if (inactivity_ms < 0) throw ConfigError("DRX inactivity timer must be >= 0");
}

void RachConfig::validate() const {
  require_repetition(preamble_repetitions, "rach.preamble_repetitions");
  if (rar_window_ms < 0 || contention_ms < 0 || backoff_ms < 0) throw ConfigError("RACH delays must be >= 0");
  if (!(slope_db > 0.0)) throw ConfigError("RACH slope must be positive");
  if (prach_prbs <= 0) throw ConfigError("RACH prach_prbs must be positive");
}

double RachConfig::success_probability(double coupling_loss_db) const {
  const double cl50 = cl50_db + 10.0 * std::log10(preamble_repetitions);
  return 1.0 / (1.0 + std::exp((coupling_loss_db - cl50) / slope_db));
}

std::int64_t rach_overhead(const RachConfig& cfg) {
  return static_cast<std::int64_t>(cfg.preamble_repetitions) * cfg.prach_prbs;
}

void CqiConfig::validate() const {
  if (mode == CqiMode::Periodic && period_ms != 0 && period_ms != 20 && period_ms != 40 && period_ms != 80)
    throw ConfigError("CQI period must be one of 20, 40, 80 or 0 (never)");
}

void CeConfig::validate() const {
  require_repetition(rl_mpdcch, "ce.rl_mpdcch");
  require_repetition(rl_pusch, "ce.rl_pusch");
  require_repetition(rl_pdsch, "ce.rl_pdsch");
  require_repetition(rl_pucch, "ce.rl_pucch");
}

// ---------------------------------------------------------------------------

UeContext::UeContext(int id, const PowerControlState& pc0, const mac::LinkAdaptationState& la0, bool full_duplex)
    : ue_id(id), pc(pc0), pc_initial(pc0), la(la0), la_initial(la0), calendar(4096, full_duplex) {}

bool UeContext::monitors_mpdcch(Tti tti) const {
  if (rrc_state != RrcState::Connected) return false;
  if (!drx) return true;
  if (tti % drx->cycle_ms < drx->on_duration_ms) return true;
  return tti - last_activity_tti < drx->inactivity_ms;
}

Tti UeContext::next_monitoring_tti(Tti tti) const {
  if (monitors_mpdcch(tti) || rrc_state != RrcState::Connected || !drx) return tti;
  const Tti phase = tti % drx->cycle_ms;
  return tti - phase + drx->cycle_ms;
}

RrcStep step_rrc(UeContext& ue, Tti tti, const RrcEvents& ev) {
  RrcStep out;
  if (ev.rach_complete) {
    CATM_ENSURE(ue.rach_pending, "RACH completion without a pending RACH for UE " + std::to_string(ue.ue_id));
    ue.rach_pending = false;
    ue.rrc_state = RrcState::Connected;
    ue.last_activity_tti = tti;
    out.connected = true;
  }
  if (ue.rrc_state == RrcState::Idle) {
    if (ev.data_arrival && !ue.rach_pending) {
      ue.rach_pending = true;
      out.rach_initiated = true;
      out.rach_start_tti = tti + 1;
    }
  } else {
    if (ev.data_arrival || ev.data_activity) {
      ue.last_activity_tti = tti;
    } else if (tti - ue.last_activity_tti >= ue.dormancy_timer_ms) {
      ue.rrc_state = RrcState::Idle;
      ue.pc = ue.pc_initial;
      ue.la = ue.la_initial;
      out.released = true;
    }
  }
  out.mpdcch_monitoring = ue.monitors_mpdcch(tti);
  return out;
}

}  // namespace catm::ue
