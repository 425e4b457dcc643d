#include "catm/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <random>
#include <thread>

#include "catm/mac_scheduler.hpp"
#include "catm/traffic.hpp"

namespace catm::sim {

namespace {

constexpr double kNoSignalDbm = -200.0;
constexpr std::uint64_t kTrafficStream = 0x5452414600000000ull;
constexpr std::uint64_t kDecodeStream = 0x4445434f00000000ull;
constexpr std::uint64_t kRachStream = 0x5241434800000000ull;
constexpr Tti kAuditPeriod = 1000;
/// Payload of the random access response, carried on MPDCCH-scheduled resources.
constexpr int kRarBits = 56;

double mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double dbm(double mw_value) { return mw_value > 0.0 ? 10.0 * std::log10(mw_value) : kNoSignalDbm; }
int dix(Direction d) { return d == Direction::Uplink ? 0 : 1; }

}  // namespace

// ---------------------------------------------------------------------------
// Free helpers

double co_channel_interference_mw(const std::vector<ActiveTx>& snapshot, const Layout& layout, int ue,
                                  Direction dir, grid::PrbRange prbs) {
  if (prbs.count <= 0) return 0.0;
  const UeDrop& u = layout.ues[static_cast<std::size_t>(ue)];
  double sum = 0.0;
  for (const ActiveTx& tx : snapshot) {
    if (tx.direction != dir) continue;
    const int lo = std::max(tx.prbs.first, prbs.first);
    const int hi = std::min(tx.prbs.end(), prbs.end());
    if (hi <= lo) continue;
    const double share = static_cast<double>(hi - lo) / prbs.count;
    double loss;
    if (dir == Direction::Downlink) {
      if (tx.cell == u.serving_cell) continue;
      loss = u.coupling_loss_db[static_cast<std::size_t>(tx.cell)];
    } else {
      if (tx.ue == ue || tx.cell == u.serving_cell) continue;
      loss = layout.ues[static_cast<std::size_t>(tx.ue)].coupling_loss_db[static_cast<std::size_t>(u.serving_cell)];
    }
    sum += share * mw(tx.power_per_prb_dbm - loss);
  }
  return sum;
}

double legacy_interference_mw(const Scenario& sc, const Layout& layout, int ue, Direction dir,
                              double enb_power_per_prb_dbm) {
  if (sc.radio.interference != InterferenceMode::Shared || sc.radio.legacy_load <= 0.0) return 0.0;
  const UeDrop& u = layout.ues[static_cast<std::size_t>(ue)];
  if (dir == Direction::Uplink) return sc.radio.legacy_load * mw(sc.radio.legacy_ul_interference_dbm_per_prb);
  double sum = 0.0;
  for (const Cell& c : layout.cells)
    if (c.id != u.serving_cell) sum += mw(enb_power_per_prb_dbm - u.coupling_loss_db[static_cast<std::size_t>(c.id)]);
  return sc.radio.legacy_load * sum;
}

CeTier ce_tier(double cl) {
  if (cl < 130.0) return {{1, 1, 1, 1}, 1};
  if (cl < 140.0) return {{2, 4, 4, 2}, 4};
  if (cl < 150.0) return {{8, 16, 16, 8}, 16};
  return {{32, 64, 64, 32}, 64};
}

// ---------------------------------------------------------------------------
// Runtime state

namespace {

struct PacketRec {
  int ue = 0;
  Direction dir = Direction::Uplink;
  Tti arrival = 0;
  int size_bits = 0;
  int unassigned_bits = 0;
  int open_tbs = 0;
  bool failed = false;
  bool violated = false;
  bool resolved = false;
  bool voip = false;
  bool sid = false;
};

struct TbPart {
  std::int64_t packet = 0;
  int bits = 0;
};

struct TransportBlock {
  std::vector<TbPart> parts;
  int payload_bits = 0;
  int mcs = 0;
  int n_prbs = 1;
  int tbs_bits = 0;
  int rl_data = 1;
  int attempts = 0;
  double sinr_lin_sum = 0.0;  // per-attempt mean linear SINR, summed over attempts
  bool voip = false;
  Tti oldest_arrival = 0;
};

enum class ProcState { Idle, InFlight, AwaitRetx };

struct HarqProc {
  ProcState state = ProcState::Idle;
  TransportBlock tb;
  mac::Grant grant;
  Tti next_eligible = 0;
  Tti first_tx_tti = 0;
  double attempt_lin_sum = 0.0;
  double attempt_intf_mw = 0.0;
  int attempt_samples = 0;
  bool outcome_pending = false;
  bool decoded_ok = false;
  Tti feedback_tti = -1;
};

enum class RachPhase { None, Preamble, AwaitRar, RarInFlight, Contention };

struct SelectionKey {
  bool estimate = false;
  double interference = 0.0;
  double olla = 0.0;
  double tpc = 0.0;
  int queue_bits = 0;
  int fixed_rl = 0;
  bool operator==(const SelectionKey&) const = default;
};

struct UeRt {
  int id = 0;
  int group = 0;
  int cell = 0;
  double cl = 0.0;
  ue::UeContext ctx;
  CeTier tier;
  bool adaptive_rl = true;
  TrafficKind kind = TrafficKind::Bursty;
  std::optional<traffic::TrafficSource> source;
  std::optional<traffic::TrafficEvent> next_event;
  int dl_ack_bits = 0;
  std::vector<std::pair<Tti, int>> pending_dl_acks;

  std::array<std::deque<std::int64_t>, 2> queue;
  std::array<std::int64_t, 2> queued_bits{0, 0};
  std::array<std::vector<HarqProc>, 2> procs;

  bool ul_known = false;
  bool sr_grant_priority = false;
  Tti sr_end = -1;
  Tti cqi_end = -1;
  std::array<bool, 2> estimate{false, false};
  std::array<double, 2> interference_estimate_dbm{kNoSignalDbm, kNoSignalDbm};
  std::array<double, 2> last_sinr_db{std::numeric_limits<double>::quiet_NaN(),
                                     std::numeric_limits<double>::quiet_NaN()};
  int clpc_samples = 0;

  RachPhase rach_phase = RachPhase::None;
  Tti rach_tti = 0;  // Preamble: start; AwaitRar: earliest RAR; RarInFlight: RAR end; Contention: completion
  Tti preamble_end = -1;
  int preamble_reps = 1;

  std::array<int, 2> seg_left{0, 0};
  std::array<int, 2> seg_bits{0, 0};

  std::array<std::optional<std::pair<SelectionKey, mac::TransmissionChoice>>, 2> selection_cache;

  std::mt19937_64 rng_decode;
  std::mt19937_64 rng_rach;
  bool activity = false;
  bool arrival = false;
  UeKpi kpi;

  UeRt(int id_, const ue::PowerControlState& pc, const mac::LinkAdaptationState& la)
      : id(id_), ctx(id_, pc, la, false) {}
};

struct CellRt {
  int id = 0;
  grid::ResourceGrid grid;
  std::vector<int> ues;
  std::int64_t rr = 0;
  CellRt(int id_, int total_prbs, grid::PrbRange nb) : id(id_), grid(total_prbs, nb) {}
};

/// A candidate plus what to do with the UE state if it commits.
struct PendingGrant {
  int ue = 0;
  bool retx = false;
  bool rar = false;
  Direction dir = Direction::Uplink;
  int proc = -1;
  int payload_bits = 0;
  bool coverage_limited = false;
  int seg_left = 0;
  int seg_bits = 0;
};

}  // namespace

struct Simulator::Impl {
  Scenario sc;
  Layout layout;
  radio::BlerModel bler;
  TbsTable tbs;
  grid::BandwidthProfile profile;
  grid::NarrowbandPlan nb_plan;
  double enb_power_per_prb_dbm = 0.0;
  std::vector<CellRt> cells;
  std::vector<UeRt> ues;
  std::vector<PacketRec> packets;
  std::vector<ActiveTx> prev_snapshot, cur_snapshot;
  Tti tti = 0;
  SimCounters counters;
  std::string trace;
  double sinr_lin_total = 0.0;
  std::int64_t sinr_samples = 0;

  explicit Impl(const Scenario& s);

  bool tracing(TraceLevel level) const { return sc.output.trace >= level; }
  void trace_line(const char* event, const UeRt& u, const char* dir, int harq, int mcs, int prbs, int rl, int tbs_bits,
                  double power, double sinr, const char* detail);

  // TTI phases
  void arrivals(Tti t);
  void protocol(Tti t);
  void schedule(Tti t);
  void transmissions(Tti t);
  void feedback(Tti t);

  // helpers
  void offer(UeRt& u, Direction dir, Tti t, int bits, bool voip, bool sid);
  std::vector<TbPart> take_bits(UeRt& u, Direction dir, int bits);
  void fail_packet(std::int64_t id, bool violated, Tti t);
  void finalize_packet(std::int64_t id, Tti t);
  void resolve_part(const TbPart& part, bool ok, Tti delivery_tti);
  mac::LinkQuality link_quality(const UeRt& u, Direction dir) const;
  mac::TransmissionChoice choose(UeRt& u, Direction dir, int queue_bits, std::optional<int> fixed_rl);
  bool awake(const UeRt& u, Tti t) const;
  std::optional<std::pair<mac::Candidate, PendingGrant>> candidate_for(UeRt& u, CellRt& c, Tti t);
  void apply_grant(const mac::Grant& g, const PendingGrant& p, Tti t);
  void decode(UeRt& u, HarqProc& p, Tti t);
  double measured_interference_mw(const UeRt& u, Direction dir, grid::PrbRange prbs) const;
  void audit() const;
  KpiReport report() const;
};

Simulator::Impl::Impl(const Scenario& s) : sc(s) {
  sc.validate();
  bler = sc.radio.bler_table == "builtin" ? radio::BlerModel::builtin() : radio::BlerModel::load(sc.radio.bler_table);
  tbs = sc.radio.tbs_table == "builtin" ? TbsTable::builtin() : TbsTable::load(sc.radio.tbs_table);
  tbs.set_max_tbs(sc.scheduler.max_tbs_bits);
  try {
    const auto table = sc.bandwidth.layout_table == "builtin" ? grid::NarrowbandLayoutTable::builtin()
                                                              : grid::NarrowbandLayoutTable::load(sc.bandwidth.layout_table);
    profile = table.profile(sc.bandwidth.bandwidth_mhz);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scenario.bandwidth.bandwidth_mhz: ") + e.what());
  }
  if (sc.bandwidth.narrowband < 0) {
    nb_plan = grid::choose_narrowband(profile);
  } else {
    const auto plans = grid::enumerate_narrowbands(profile);
    if (sc.bandwidth.narrowband >= static_cast<int>(plans.size()))
      throw ConfigError("scenario.bandwidth.narrowband: index " + std::to_string(sc.bandwidth.narrowband) +
                        " out of range (" + std::to_string(plans.size()) + " narrowbands)");
    nb_plan = plans[static_cast<std::size_t>(sc.bandwidth.narrowband)];
  }
  enb_power_per_prb_dbm = sc.radio.enb_total_power_dbm - 10.0 * std::log10(profile.total_prbs);

  layout = build_layout(sc);
  for (const Cell& c : layout.cells) cells.emplace_back(c.id, profile.total_prbs, nb_plan.prb_range);

  ues.reserve(layout.ues.size());
  for (const UeDrop& d : layout.ues) {
    const UeGroup& g = sc.ue_groups[static_cast<std::size_t>(d.group)];
    auto la = mac::LinkAdaptationState::with_target(sc.scheduler.ibler_target, sc.scheduler.step_up_db,
                                                    sc.scheduler.initial_mcs);
    ue::PowerControlState pc = g.power_control;
    pc.tpc_accum_db = 0.0;
    UeRt& u = ues.emplace_back(d.id, pc, la);
    u.group = d.group;
    u.cell = d.serving_cell;
    u.cl = d.coupling_loss_db[static_cast<std::size_t>(d.serving_cell)];
    u.tier = ce_tier(u.cl);
    if (g.ce) {
      u.tier.ce = *g.ce;
    }
    u.ctx.ce = u.tier.ce;
    u.ctx.dormancy_timer_ms = g.dormancy_ms;
    u.ctx.drx = g.drx;
    u.ctx.cqi = g.cqi;
    u.adaptive_rl = g.adaptive_rl;
    u.kind = g.traffic.kind;
    const auto stream = kTrafficStream + static_cast<std::uint64_t>(d.id);
    switch (g.traffic.kind) {
      case TrafficKind::Bursty:
        u.source = traffic::TrafficSource::bursty(g.traffic.bursty, sc.seed, stream);
        u.dl_ack_bits = g.traffic.bursty.dl_ack_bits;
        break;
      case TrafficKind::Voip:
        u.source = traffic::TrafficSource::voip(g.traffic.voip, sc.seed, stream);
        break;
      case TrafficKind::FullBuffer:
        break;
    }
    if (u.source) u.next_event = u.source->next_event();
    for (auto& v : u.procs) v.resize(static_cast<std::size_t>(sc.scheduler.harq_processes));
    u.rng_decode = traffic::make_stream(sc.seed, kDecodeStream + static_cast<std::uint64_t>(d.id));
    u.rng_rach = traffic::make_stream(sc.seed, kRachStream + static_cast<std::uint64_t>(d.id));
    u.preamble_reps = sc.rach.preamble_repetitions * ce_tier(u.cl).ce.rl_mpdcch;
    if (g.start_connected) {
      u.ctx.rrc_state = ue::RrcState::Connected;
      u.ctx.last_activity_tti = 0;
    }
    u.kpi.ue_id = d.id;
    u.kpi.group = d.group;
    u.kpi.cell = d.serving_cell;
    u.kpi.coupling_loss_db = u.cl;
    u.kpi.measured = !sc.layout.measure_center_only ||
                     layout.cells[static_cast<std::size_t>(d.serving_cell)].site == 0;
    cells[static_cast<std::size_t>(d.serving_cell)].ues.push_back(d.id);
  }
  if (tracing(TraceLevel::Summary)) trace = "tti,event,ue,cell,dir,harq,mcs,prbs,rl,tbs_bits,power_dbm,sinr_db,detail\n";
}

void Simulator::Impl::trace_line(const char* event, const UeRt& u, const char* dir, int harq, int mcs, int prbs,
                                 int rl, int tbs_bits, double power, double sinr, const char* detail) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%lld,%s,%d,%d,%s,%d,%d,%d,%d,%d,%.3f,%.3f,%s\n", static_cast<long long>(tti),
                event, u.id, u.cell, dir, harq, mcs, prbs, rl, tbs_bits, power, sinr, detail);
  trace += buf;
}

// --- packets ---------------------------------------------------------------

void Simulator::Impl::offer(UeRt& u, Direction dir, Tti t, int bits, bool voip, bool sid) {
  PacketRec p;
  p.ue = u.id;
  p.dir = dir;
  p.arrival = t;
  p.size_bits = bits;
  p.unassigned_bits = bits;
  p.voip = voip;
  p.sid = sid;
  const auto id = static_cast<std::int64_t>(packets.size());
  packets.push_back(p);
  u.queue[dix(dir)].push_back(id);
  u.queued_bits[dix(dir)] += bits;
  ++u.kpi.offered_packets;
  ++u.kpi.in_flight_packets;
  u.kpi.offered_bits += bits;
  if (voip) ++u.kpi.voip_packets;
  if (dir == Direction::Uplink || u.ctx.rrc_state == ue::RrcState::Idle) u.arrival = true;
}

std::vector<TbPart> Simulator::Impl::take_bits(UeRt& u, Direction dir, int bits) {
  std::vector<TbPart> parts;
  auto& q = u.queue[dix(dir)];
  for (auto it = q.begin(); it != q.end() && bits > 0; ++it) {
    PacketRec& p = packets[static_cast<std::size_t>(*it)];
    if (p.unassigned_bits == 0) continue;
    const int n = std::min(bits, p.unassigned_bits);
    p.unassigned_bits -= n;
    ++p.open_tbs;
    bits -= n;
    u.queued_bits[dix(dir)] -= n;
    parts.push_back({*it, n});
  }
  while (!q.empty() && packets[static_cast<std::size_t>(q.front())].unassigned_bits == 0) q.pop_front();
  return parts;
}

void Simulator::Impl::finalize_packet(std::int64_t id, Tti t) {
  PacketRec& p = packets[static_cast<std::size_t>(id)];
  if (p.resolved || p.unassigned_bits > 0 || p.open_tbs > 0) return;
  UeRt& u = ues[static_cast<std::size_t>(p.ue)];
  const double latency = static_cast<double>(t - p.arrival);
  if (!p.failed && p.voip && latency > sc.scheduler.voip_delay_budget_ms) {
    p.failed = true;
    p.violated = true;
  }
  p.resolved = true;
  --u.kpi.in_flight_packets;
  if (p.failed) {
    ++u.kpi.dropped_packets;
    if (p.voip) ++u.kpi.budget_violations;
    if (tracing(TraceLevel::Summary))
      trace_line("drop", u, to_string(p.dir), -1, -1, 0, 0, p.size_bits, 0.0, 0.0, p.violated ? "budget" : "harq");
    return;
  }
  CATM_ENSURE(!p.violated, "a budget-violated packet was delivered");
  ++u.kpi.delivered_packets;
  u.kpi.delivered_bits += p.size_bits;
  u.kpi.latencies_ms.push_back(latency);
  u.kpi.experienced_rate_sum_bps += p.size_bits / (std::max(latency, 1.0) / 1000.0);
  if (p.dir == Direction::Uplink && u.dl_ack_bits > 0) u.pending_dl_acks.emplace_back(t, u.dl_ack_bits);
}

void Simulator::Impl::fail_packet(std::int64_t id, bool violated, Tti t) {
  PacketRec& p = packets[static_cast<std::size_t>(id)];
  if (p.resolved) return;
  UeRt& u = ues[static_cast<std::size_t>(p.ue)];
  p.failed = true;
  p.violated = p.violated || violated;
  u.queued_bits[dix(p.dir)] -= p.unassigned_bits;
  p.unassigned_bits = 0;
  finalize_packet(id, t);
}

void Simulator::Impl::resolve_part(const TbPart& part, bool ok, Tti delivery_tti) {
  PacketRec& p = packets[static_cast<std::size_t>(part.packet)];
  CATM_ENSURE(p.open_tbs > 0, "transport block part without an open packet");
  --p.open_tbs;
  if (!ok) {
    fail_packet(part.packet, false, delivery_tti);
    return;
  }
  finalize_packet(part.packet, delivery_tti);
}

// --- phase 1: arrivals ------------------------------------------------------

void Simulator::Impl::arrivals(Tti t) {
  for (UeRt& u : ues) {
    u.arrival = false;
    u.activity = false;
    while (u.next_event && u.next_event->arrival_ms < static_cast<double>(t + 1)) {
      const auto& e = *u.next_event;
      offer(u, e.direction, t, e.size_bits, u.kind == TrafficKind::Voip, e.sid);
      u.next_event = u.source->next_event();
    }
    for (auto it = u.pending_dl_acks.begin(); it != u.pending_dl_acks.end();) {
      if (it->first <= t) {
        offer(u, Direction::Downlink, t, it->second, false, false);
        it = u.pending_dl_acks.erase(it);
      } else {
        ++it;
      }
    }
    if (u.kind == TrafficKind::FullBuffer) {
      const auto& fb = sc.ue_groups[static_cast<std::size_t>(u.group)].traffic.full_buffer;
      while (u.queued_bits[dix(fb.direction)] < 2LL * tbs.max_tbs()) offer(u, fb.direction, t, fb.block_bits, false, false);
    }
  }
}

// --- phase 2: RRC, RACH, SR, CQI --------------------------------------------

void Simulator::Impl::protocol(Tti t) {
  for (UeRt& u : ues) {
    u.ctx.calendar.advance_to(t);
    bool busy = false;
    for (const auto& v : u.procs)
      for (const HarqProc& p : v) busy = busy || p.state != ProcState::Idle;
    ue::RrcEvents ev;
    const bool has_data = u.queued_bits[0] > 0 || u.queued_bits[1] > 0;
    ev.data_arrival = u.arrival || (u.ctx.rrc_state == ue::RrcState::Idle && has_data);
    ev.data_activity = busy || u.sr_end >= 0 || (u.ctx.rrc_state == ue::RrcState::Connected && u.queued_bits[0] > 0);
    ev.rach_complete = u.rach_phase == RachPhase::Contention && t >= u.rach_tti;
    const ue::RrcStep st = ue::step_rrc(u.ctx, t, ev);
    if (st.connected) {
      u.rach_phase = RachPhase::None;
      u.ul_known = u.queued_bits[0] > 0;  // buffer status rides on the connection request
      u.sr_grant_priority = u.ul_known;
      u.estimate = {false, false};
      u.clpc_samples = 0;
      if (tracing(TraceLevel::Summary)) trace_line("connect", u, "-", -1, -1, 0, 0, 0, 0.0, 0.0, "");
    }
    if (st.released) {
      u.estimate = {false, false};
      u.interference_estimate_dbm = {kNoSignalDbm, kNoSignalDbm};
      u.clpc_samples = 0;
      u.ul_known = false;
      u.sr_grant_priority = false;
      u.selection_cache = {};
      if (tracing(TraceLevel::Summary)) trace_line("release", u, "-", -1, -1, 0, 0, 0, 0.0, 0.0, "");
    }
    if (st.rach_initiated) {
      u.rach_phase = RachPhase::Preamble;
      u.rach_tti = st.rach_start_tti;
    }

    // Random access: preamble, RAR wait, contention resolution.
    if (u.rach_phase == RachPhase::Preamble && t == u.rach_tti && u.preamble_end < 0) {
      if (u.ctx.calendar.book(t, u.preamble_reps, Direction::Uplink)) {
        u.rach_tti = t + 1;  // calendar busy: try again next TTI
      } else {
        u.preamble_end = t + u.preamble_reps - 1;
        ++u.kpi.rach_attempts;
        ue::RachConfig rc = sc.rach;
        rc.preamble_repetitions = u.preamble_reps;
        u.kpi.rach_overhead_prb_ttis += ue::rach_overhead(rc);
        if (tracing(TraceLevel::Summary))
          trace_line("preamble", u, "UL", -1, -1, rc.prach_prbs, u.preamble_reps, 0, 0.0, 0.0, "");
      }
    }
    if (u.rach_phase == RachPhase::Preamble && t == u.preamble_end) {
      u.preamble_end = -1;
      ue::RachConfig rc = sc.rach;
      rc.preamble_repetitions = u.preamble_reps;
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      if (unit(u.rng_rach) < rc.success_probability(u.cl)) {
        u.rach_phase = RachPhase::AwaitRar;
        u.rach_tti = t + sc.rach.rar_window_ms;
      } else {
        u.rach_tti = t + sc.rach.backoff_ms + 1;
      }
    }
    if (u.rach_phase == RachPhase::RarInFlight && t >= u.rach_tti) {
      u.rach_phase = RachPhase::Contention;
      u.rach_tti = t + sc.rach.contention_ms;
    }

    if (u.ctx.rrc_state != ue::RrcState::Connected) continue;

    // Scheduling request for UL data the eNB does not know about.
    if (u.sr_end >= 0 && t == u.sr_end) {
      u.sr_end = -1;
      u.ul_known = true;
      u.sr_grant_priority = true;
    }
    if (u.queued_bits[0] > 0 && !u.ul_known && u.sr_end < 0 && (t + u.id) % sc.scheduler.sr_period_ms == 0) {
      if (!u.ctx.calendar.book(t, u.ctx.ce.rl_pucch, Direction::Uplink)) {
        u.sr_end = t + u.ctx.ce.rl_pucch - 1;
        u.activity = true;
        if (tracing(TraceLevel::Summary)) trace_line("sr", u, "UL", -1, -1, 0, u.ctx.ce.rl_pucch, 0, 0.0, 0.0, "");
        if (u.sr_end == t) {
          u.sr_end = -1;
          u.ul_known = true;
          u.sr_grant_priority = true;
        }
      }
    }

    // Periodic CQI on PUCCH gives the eNB its DL estimate.
    if (u.cqi_end >= 0 && t >= u.cqi_end) {
      u.cqi_end = -1;
      u.estimate[1] = true;
      u.interference_estimate_dbm[1] = dbm(measured_interference_mw(u, Direction::Downlink, nb_plan.prb_range));
    }
    const auto& cqi = u.ctx.cqi;
    if (cqi.mode == ue::CqiMode::Periodic && cqi.period_ms > 0 && u.cqi_end < 0 &&
        (t + 3LL * u.id) % cqi.period_ms == 0 && u.ctx.monitors_mpdcch(t)) {
      if (!u.ctx.calendar.book(t, u.ctx.ce.rl_pucch, Direction::Uplink)) u.cqi_end = t + u.ctx.ce.rl_pucch - 1;
    }
  }
}

// --- phase 3: scheduling ----------------------------------------------------

mac::LinkQuality Simulator::Impl::link_quality(const UeRt& u, Direction dir) const {
  mac::LinkQuality q;
  q.direction = dir;
  q.coupling_loss_db = u.cl;
  q.interference_dbm = u.estimate[dix(dir)] ? u.interference_estimate_dbm[dix(dir)] : kNoSignalDbm;
  q.ue_pc = u.ctx.pc;
  q.enb_power_per_prb_dbm = enb_power_per_prb_dbm;
  return q;
}

mac::TransmissionChoice Simulator::Impl::choose(UeRt& u, Direction dir, int queue_bits, std::optional<int> fixed_rl) {
  SelectionKey key{u.estimate[dix(dir)], u.interference_estimate_dbm[dix(dir)], u.ctx.la.olla_offset_db,
                   u.ctx.pc.tpc_accum_db, std::min(queue_bits, tbs.max_tbs()), fixed_rl.value_or(0)};
  auto& cache = u.selection_cache[dix(dir)];
  if (cache && cache->first == key) return cache->second;
  mac::SelectionOptions opts;
  opts.rl_cap = sc.scheduler.rl_cap;
  opts.fixed_rl = fixed_rl;
  opts.use_initial_mcs = !u.estimate[dix(dir)];
  opts.fallback_rl = std::min(u.tier.fallback_rl, sc.scheduler.rl_cap);
  const auto choice = mac::select_transmission(link_quality(u, dir), u.ctx.la, queue_bits, bler, tbs, opts);
  cache = std::make_pair(key, choice);
  return choice;
}

bool Simulator::Impl::awake(const UeRt& u, Tti t) const {
  if (u.ctx.monitors_mpdcch(t) || u.sr_grant_priority) return true;
  for (const auto& v : u.procs)
    for (const HarqProc& p : v)
      if (p.state != ProcState::Idle) return true;
  return false;
}

std::optional<std::pair<mac::Candidate, PendingGrant>> Simulator::Impl::candidate_for(UeRt& u, CellRt& c, Tti t) {
  const int agl = sc.scheduler.agl_tiers.agl_for(u.cl);
  const int rm = u.ctx.ce.rl_mpdcch;
  // Cheap gates before any link adaptation work.
  if (c.grid.mpdcch_free(t) < agl) return std::nullopt;
  if (u.ctx.calendar.check(t, rm, Direction::Downlink)) return std::nullopt;

  mac::Candidate cand;
  cand.calendar = &u.ctx.calendar;
  PendingGrant pg;
  pg.ue = u.id;
  mac::GrantRequest& r = cand.request;
  r.ue_id = u.id;
  r.agl = agl;
  r.rl_mpdcch = rm;

  if (u.rach_phase == RachPhase::AwaitRar) {
    if (t < u.rach_tti) return std::nullopt;
    r.kind = mac::GrantKind::RachResponse;
    r.direction = Direction::Downlink;
    r.tbs_bits = kRarBits;
    r.rl_ack = 1;
    cand.priority = mac::Priority::AccessResponse;
    cand.order_key = static_cast<double>(u.id);
    pg.rar = true;
    return std::make_pair(cand, pg);
  }
  if (u.ctx.rrc_state != ue::RrcState::Connected || !awake(u, t)) return std::nullopt;

  // HARQ retransmission: oldest pending block first, same format.
  HarqProc* retx = nullptr;
  Direction retx_dir = Direction::Uplink;
  int retx_idx = -1;
  for (Direction d : {Direction::Uplink, Direction::Downlink}) {
    auto& v = u.procs[dix(d)];
    for (int i = 0; i < static_cast<int>(v.size()); ++i) {
      HarqProc& p = v[static_cast<std::size_t>(i)];
      if (p.state != ProcState::AwaitRetx || p.next_eligible > t) continue;
      if (!retx || p.first_tx_tti < retx->first_tx_tti) {
        retx = &p;
        retx_dir = d;
        retx_idx = i;
      }
    }
  }
  if (retx) {
    r.kind = mac::GrantKind::Data;
    r.direction = retx_dir;
    r.harq_process = retx_idx;
    r.mcs = retx->tb.mcs;
    r.n_prbs = retx->tb.n_prbs;
    r.tbs_bits = retx->tb.tbs_bits;
    r.rl_data = retx->tb.rl_data;
    r.rl_ack = retx_dir == Direction::Downlink ? u.ctx.ce.rl_pucch : 1;
    cand.priority = mac::Priority::HarqRetransmission;
    cand.order_key = static_cast<double>(retx->first_tx_tti);
    pg.retx = true;
    pg.dir = retx_dir;
    pg.proc = retx_idx;
    return std::make_pair(cand, pg);
  }

  // New data: pick the direction whose head packet is most urgent.
  std::optional<Direction> dir;
  Tti best_head = std::numeric_limits<Tti>::max();
  for (Direction d : {Direction::Uplink, Direction::Downlink}) {
    if (u.queued_bits[dix(d)] <= 0) continue;
    if (d == Direction::Uplink && !u.ul_known) continue;
    const auto& procs = u.procs[dix(d)];
    if (std::none_of(procs.begin(), procs.end(),
                     [&](const HarqProc& p) { return p.state == ProcState::Idle && p.next_eligible <= t; }))
      continue;
    Tti head = std::numeric_limits<Tti>::max();
    for (auto id : u.queue[dix(d)]) {
      const PacketRec& p = packets[static_cast<std::size_t>(id)];
      if (p.unassigned_bits > 0) {
        head = p.arrival;
        break;
      }
    }
    if (head < best_head) {
      best_head = head;
      dir = d;
    }
  }
  if (!dir) return std::nullopt;
  const Direction d = *dir;
  auto& procs = u.procs[dix(d)];
  int proc = -1;
  for (int i = 0; i < static_cast<int>(procs.size()); ++i)
    if (procs[static_cast<std::size_t>(i)].state == ProcState::Idle &&
        procs[static_cast<std::size_t>(i)].next_eligible <= t) {
      proc = i;
      break;
    }

  std::optional<int> fixed_rl;
  if (!u.adaptive_rl) fixed_rl = d == Direction::Uplink ? u.ctx.ce.rl_pusch : u.ctx.ce.rl_pdsch;
  const int queued = static_cast<int>(std::min<std::int64_t>(u.queued_bits[dix(d)], 1 << 30));
  mac::TransmissionChoice choice = choose(u, d, queued, fixed_rl);
  int payload = std::min(queued, choice.tbs_bits);

  if (u.kind == TrafficKind::Voip) {
    if (u.seg_left[dix(d)] > 0) {
      payload = std::min(queued, u.seg_bits[dix(d)]);
      pg.seg_left = u.seg_left[dix(d)] - 1;
      pg.seg_bits = u.seg_bits[dix(d)];
    } else {
      std::vector<mac::VoipPacket> vq;
      for (auto id : u.queue[dix(d)]) {
        const PacketRec& p = packets[static_cast<std::size_t>(id)];
        if (p.unassigned_bits > 0) vq.push_back({id, p.arrival, p.unassigned_bits, p.sid});
      }
      mac::VoipBuildConfig cfg;
      cfg.rl = {d, rm, choice.rl_data, d == Direction::Downlink ? u.ctx.ce.rl_pucch : 1};
      cfg.delay_budget_ms = sc.scheduler.voip_delay_budget_ms;
      cfg.voice_period_ms = sc.ue_groups[static_cast<std::size_t>(u.group)].traffic.voip.voice_period_ms;
      cfg.max_tbs_bits = tbs.max_tbs();
      cfg.aggregation = sc.scheduler.voip_aggregation;
      const mac::VoipBuild b = mac::voip_build(vq, cfg, t);
      for (auto id : b.budget_violated) fail_packet(id, true, t);
      if (!b.ready || b.blocks.empty()) return std::nullopt;
      payload = b.blocks.front().size_bits;
      pg.seg_left = static_cast<int>(b.blocks.size()) - 1;
      pg.seg_bits = payload;
    }
    const int remaining = static_cast<int>(u.queued_bits[dix(d)]);
    if (remaining <= 0) return std::nullopt;
    payload = std::min(payload, remaining);
    choice = choose(u, d, payload, choice.rl_data);
    payload = std::min(payload, choice.tbs_bits);
  }

  r.kind = mac::GrantKind::Data;
  r.direction = d;
  r.harq_process = proc;
  r.mcs = choice.mcs;
  r.n_prbs = choice.n_prbs;
  r.tbs_bits = choice.tbs_bits;
  r.rl_data = choice.rl_data;
  r.rl_ack = d == Direction::Downlink ? u.ctx.ce.rl_pucch : 1;
  pg.dir = d;
  pg.proc = proc;
  pg.payload_bits = payload;
  pg.coverage_limited = choice.coverage_limited;
  if (d == Direction::Uplink && u.sr_grant_priority) {
    cand.priority = mac::Priority::AccessResponse;
    cand.order_key = static_cast<double>(u.id);
  } else if (u.kind == TrafficKind::Voip) {
    cand.priority = mac::Priority::Voip;
    cand.order_key = sc.scheduler.voip_delay_budget_ms - static_cast<double>(t - best_head);
  } else {
    cand.priority = mac::Priority::Bursty;
    const auto n = static_cast<std::int64_t>(c.ues.size());
    const auto pos = std::find(c.ues.begin(), c.ues.end(), u.id) - c.ues.begin();
    cand.order_key = static_cast<double>(((pos - c.rr) % n + n) % n);
  }
  return std::make_pair(cand, pg);
}

void Simulator::Impl::apply_grant(const mac::Grant& g, const PendingGrant& pg, Tti t) {
  UeRt& u = ues[static_cast<std::size_t>(g.ue_id)];
  u.activity = true;
  ++counters.grants;
  if (pg.rar) {
    u.rach_phase = RachPhase::RarInFlight;
    u.rach_tti = g.timeline.mpdcch.last();
    if (tracing(TraceLevel::Summary))
      trace_line("rar_grant", u, "DL", -1, -1, 0, g.rl_mpdcch, kRarBits, 0.0, 0.0, "");
    return;
  }
  HarqProc& p = u.procs[dix(pg.dir)][static_cast<std::size_t>(pg.proc)];
  ++u.kpi.grants;
  if (pg.retx) {
    CATM_ENSURE(p.state == ProcState::AwaitRetx, "retransmission grant for a process not awaiting one");
    CATM_ENSURE(g.rl_data == p.tb.rl_data && g.mcs == p.tb.mcs, "format changed across HARQ attempts");
  } else {
    CATM_ENSURE(p.state == ProcState::Idle, "new data on a busy HARQ process");
    TransportBlock tb;
    tb.parts = take_bits(u, pg.dir, pg.payload_bits);
    CATM_ENSURE(!tb.parts.empty(), "grant without payload");
    tb.payload_bits = pg.payload_bits;
    tb.mcs = g.mcs;
    tb.n_prbs = g.n_prbs;
    tb.tbs_bits = g.tbs_bits;
    tb.rl_data = g.rl_data;
    tb.voip = u.kind == TrafficKind::Voip;
    tb.oldest_arrival = packets[static_cast<std::size_t>(tb.parts.front().packet)].arrival;
    p.tb = std::move(tb);
    p.first_tx_tti = t;
    if (u.kind == TrafficKind::Voip) {
      u.seg_left[dix(pg.dir)] = pg.seg_left;
      u.seg_bits[dix(pg.dir)] = pg.seg_bits;
    }
    if (pg.coverage_limited) ++u.kpi.coverage_limited_grants;
    if (pg.dir == Direction::Uplink) {
      u.sr_grant_priority = false;
      if (u.queued_bits[0] == 0) u.ul_known = false;
    }
  }
  p.state = ProcState::InFlight;
  p.grant = g;
  p.attempt_lin_sum = 0.0;
  p.attempt_intf_mw = 0.0;
  p.attempt_samples = 0;
  p.outcome_pending = false;
  if (tracing(TraceLevel::Summary))
    trace_line(pg.retx ? "retx_grant" : "grant", u, to_string(g.direction), g.harq_process, g.mcs, g.n_prbs, g.rl_data,
               g.tbs_bits, 0.0, 0.0, "");
}

void Simulator::Impl::schedule(Tti t) {
  for (CellRt& c : cells) {
    c.grid.advance_to(t);
    std::vector<mac::Candidate> cands;
    std::vector<PendingGrant> pending;
    for (int id : c.ues) {
      auto cp = candidate_for(ues[static_cast<std::size_t>(id)], c, t);
      if (!cp) continue;
      cands.push_back(cp->first);
      pending.push_back(cp->second);
    }
    if (!cands.empty()) {
      mac::ScheduleStats stats;
      const auto grants = mac::schedule_tti(cands, c.grid, t, &stats);
      counters.blocked_mpdcch += stats.blocked_mpdcch;
      counters.blocked_prbs += stats.blocked_prbs;
      counters.blocked_half_duplex += stats.blocked_half_duplex;
      for (const mac::Grant& g : grants) {
        const auto it = std::find_if(pending.begin(), pending.end(), [&](const PendingGrant& p) { return p.ue == g.ue_id; });
        CATM_ENSURE(it != pending.end(), "grant for a UE without a candidate");
        apply_grant(g, *it, t);
      }
    }
    ++c.rr;
  }
}

// --- phase 4: transmissions and decoding ------------------------------------

double Simulator::Impl::measured_interference_mw(const UeRt& u, Direction dir, grid::PrbRange prbs) const {
  return co_channel_interference_mw(prev_snapshot, layout, u.id, dir, prbs) +
         legacy_interference_mw(sc, layout, u.id, dir, enb_power_per_prb_dbm);
}

void Simulator::Impl::decode(UeRt& u, HarqProc& p, Tti t) {
  TransportBlock& tb = p.tb;
  const double attempt_lin = p.attempt_lin_sum / p.attempt_samples;
  tb.sinr_lin_sum += attempt_lin;
  ++tb.attempts;
  const double eff = radio::combined_sinr_db(10.0 * std::log10(tb.sinr_lin_sum / tb.attempts),
                                             static_cast<double>(tb.attempts) * tb.rl_data,
                                             bler.combining_penalty_db_per_doubling());
  const double prob = bler.bler(eff, tb.mcs, tb.tbs_bits);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool ok = unit(u.rng_decode) >= prob;
  ++u.kpi.transmissions;
  if (tb.attempts == 1) {
    ++u.kpi.tb_first_attempts;
    if (!ok) ++u.kpi.tb_first_failures;
  }
  const Direction dir = p.grant.direction;
  u.last_sinr_db[dix(dir)] = 10.0 * std::log10(attempt_lin);
  if (tracing(TraceLevel::Summary))
    trace_line(ok ? "ack" : "nack", u, to_string(dir), p.grant.harq_process, tb.mcs, tb.n_prbs, tb.rl_data,
               tb.tbs_bits, 0.0, eff, "");

  if (ok) {
    for (const TbPart& part : tb.parts) resolve_part(part, true, t + 1);
    tb.parts.clear();
  }
  p.outcome_pending = true;
  p.decoded_ok = ok;
  p.feedback_tti = dir == Direction::Uplink ? t : p.grant.timeline.ack.last();

  if (dir == Direction::Uplink) {
    // The eNB measures the PUSCH: UL estimate, buffer status and (aperiodic) CQI.
    u.estimate[0] = true;
    u.interference_estimate_dbm[0] = dbm(p.attempt_intf_mw / p.attempt_samples);
    if (u.queued_bits[0] > 0) u.ul_known = true;
    if (u.ctx.cqi.mode == ue::CqiMode::AperiodicOnPusch) {
      u.estimate[1] = true;
      u.interference_estimate_dbm[1] = dbm(measured_interference_mw(u, Direction::Downlink, nb_plan.prb_range));
    }
    if (u.ctx.pc.mode == ue::PowerControlMode::Clpc) {
      ++u.clpc_samples;
      if (u.clpc_samples >= sc.scheduler.clpc.min_samples) {
        const double step = u.last_sinr_db[0] < sc.scheduler.clpc.target_sinr_db ? sc.scheduler.clpc.step_db
                                                                                  : -sc.scheduler.clpc.step_db;
        const double lim = sc.scheduler.clpc.accum_limit_db;
        u.ctx.pc.tpc_accum_db = std::clamp(u.ctx.pc.tpc_accum_db + step, -lim, lim);
      }
    }
  }
}

void Simulator::Impl::transmissions(Tti t) {
  cur_snapshot.clear();
  for (UeRt& u : ues) {
    for (auto& v : u.procs)
      for (HarqProc& p : v) {
        if (p.state != ProcState::InFlight) continue;
        const mac::TtiRange& data = p.grant.timeline.data;
        if (t < data.first || t > data.last()) continue;
        const Direction dir = p.grant.direction;
        double power_per_prb;
        double tx_power;
        if (dir == Direction::Uplink) {
          tx_power = ue::tx_power(u.ctx.pc, u.cl, p.grant.n_prbs);
          power_per_prb = tx_power - 10.0 * std::log10(p.grant.n_prbs);
        } else {
          power_per_prb = enb_power_per_prb_dbm;
          tx_power = power_per_prb + 10.0 * std::log10(p.grant.n_prbs);
        }
        cur_snapshot.push_back({u.cell, dir == Direction::Uplink ? u.id : -1, dir, p.grant.prbs, power_per_prb});
        const double nf = dir == Direction::Uplink ? radio::kEnbNoiseFigureDb : radio::kUeNoiseFigureDb;
        const double intf = measured_interference_mw(u, dir, p.grant.prbs);
        const double sinr_lin = mw(power_per_prb - u.cl) / (mw(radio::noise_dbm(1, nf)) + intf);
        p.attempt_lin_sum += sinr_lin;
        p.attempt_intf_mw += intf;
        ++p.attempt_samples;
        sinr_lin_total += sinr_lin;
        ++sinr_samples;
        u.activity = true;
        if (tracing(TraceLevel::Full))
          trace_line("tx", u, to_string(dir), p.grant.harq_process, p.grant.mcs, p.grant.n_prbs, p.grant.rl_data,
                     p.grant.tbs_bits, tx_power, 10.0 * std::log10(sinr_lin), "");
        if (t == data.last()) decode(u, p, t);
      }
  }
}

// --- phase 5: HARQ feedback -------------------------------------------------

void Simulator::Impl::feedback(Tti t) {
  for (UeRt& u : ues) {
    for (auto& v : u.procs)
      for (HarqProc& p : v) {
        if (!p.outcome_pending || p.feedback_tti != t) continue;
        p.outcome_pending = false;
        TransportBlock& tb = p.tb;
        if (tb.attempts == 1) mac::outer_loop_update(u.ctx.la, p.decoded_ok);
        p.next_eligible = p.grant.timeline.next_eligible;
        if (p.decoded_ok) {
          ++u.kpi.tb_completed;
          p.state = ProcState::Idle;
          continue;
        }
        bool retry = tb.attempts < sc.scheduler.max_attempts;
        bool budget = false;
        if (retry && tb.voip) {
          // Another attempt must still finish inside the delay budget.
          const Tti done = p.next_eligible +
                           data_end_offset(p.grant.direction, p.grant.rl_mpdcch, p.grant.rl_data) + 1;
          if (static_cast<double>(done - tb.oldest_arrival) > sc.scheduler.voip_delay_budget_ms) {
            retry = false;
            budget = true;
          }
        }
        if (retry) {
          p.state = ProcState::AwaitRetx;
          continue;
        }
        ++u.kpi.tb_completed;
        ++u.kpi.tb_failed;
        for (const TbPart& part : tb.parts) {
          PacketRec& pk = packets[static_cast<std::size_t>(part.packet)];
          --pk.open_tbs;
          fail_packet(part.packet, budget, t);
        }
        tb.parts.clear();
        p.state = ProcState::Idle;
      }
  }
}

// --- audit and report -------------------------------------------------------

void Simulator::Impl::audit() const {
  for (const CellRt& c : cells) {
    c.grid.audit();
    CATM_ENSURE(c.grid.usage().max_mpdcch_units_in_tti <= c.grid.mpdcch_capacity(), "MPDCCH pool overrun");
  }
  std::vector<std::int64_t> open(ues.size(), 0);
  for (const PacketRec& p : packets)
    if (!p.resolved) ++open[static_cast<std::size_t>(p.ue)];
  for (const UeRt& u : ues) {
    u.ctx.calendar.audit();
    const UeKpi& k = u.kpi;
    CATM_ENSURE(k.in_flight_packets == open[static_cast<std::size_t>(u.id)],
                "in-flight packet count disagrees with the packet table for UE " + std::to_string(u.id) + " (" + std::to_string(k.in_flight_packets) + " vs " + std::to_string(open[static_cast<std::size_t>(u.id)]) + ", offered " + std::to_string(k.offered_packets) + ")");
    CATM_ENSURE(k.delivered_packets + k.dropped_packets + k.in_flight_packets == k.offered_packets,
                "packet conservation broken for UE " + std::to_string(u.id));
    CATM_ENSURE(k.delivered_bits <= k.offered_bits, "delivered more bits than offered");
    std::int64_t queued[2] = {0, 0};
    for (int d = 0; d < 2; ++d)
      for (auto id : u.queue[static_cast<std::size_t>(d)]) queued[d] += packets[static_cast<std::size_t>(id)].unassigned_bits;
    CATM_ENSURE(queued[0] == u.queued_bits[0] && queued[1] == u.queued_bits[1], "queue bit count drifted");
  }
}

KpiReport Simulator::Impl::report() const {
  KpiReport r;
  r.scenario = sc.name;
  r.seed = sc.seed;
  r.duration_ms = tti;
  for (const UeRt& u : ues) r.ues.push_back(u.kpi);
  for (const CellRt& c : cells) {
    CellKpi k;
    k.cell = c.id;
    k.measured = !sc.layout.measure_center_only || layout.cells[static_cast<std::size_t>(c.id)].site == 0;
    k.usage = c.grid.usage();
    k.narrowband_prbs = nb_plan.prb_range.count;
    k.mpdcch_capacity = c.grid.mpdcch_capacity();
    r.cells.push_back(k);
  }
  r.config = to_json(sc);
  return r;
}

// ---------------------------------------------------------------------------

Simulator::Simulator(const Scenario& sc) : impl_(std::make_unique<Impl>(sc)) {}
Simulator::~Simulator() = default;

void Simulator::step() {
  Impl& s = *impl_;
  const Tti t = s.tti;
  s.arrivals(t);
  s.protocol(t);
  s.schedule(t);
  s.transmissions(t);
  s.feedback(t);
  std::swap(s.prev_snapshot, s.cur_snapshot);
  s.tti = t + 1;
  if (s.tti % kAuditPeriod == 0) {
    s.audit();
    ++s.counters.audits;
  }
}

void Simulator::run() {
  while (impl_->tti < impl_->sc.duration_ms) step();
  for (CellRt& c : impl_->cells) c.grid.advance_to(impl_->tti);
  impl_->audit();
  ++impl_->counters.audits;
}

Tti Simulator::now() const { return impl_->tti; }
const Scenario& Simulator::scenario() const { return impl_->sc; }
const Layout& Simulator::layout() const { return impl_->layout; }
KpiReport Simulator::report() const { return impl_->report(); }
const std::string& Simulator::trace_csv() const { return impl_->trace; }
const SimCounters& Simulator::counters() const { return impl_->counters; }
void Simulator::audit() const { impl_->audit(); }

double Simulator::last_sinr_db(int ue, Direction dir) const {
  return impl_->ues.at(static_cast<std::size_t>(ue)).last_sinr_db[static_cast<std::size_t>(dix(dir))];
}

double Simulator::mean_sinr_db() const {
  if (impl_->sinr_samples == 0) return std::numeric_limits<double>::quiet_NaN();
  return 10.0 * std::log10(impl_->sinr_lin_total / static_cast<double>(impl_->sinr_samples));
}

RunOutput run_scenario(const Scenario& sc) {
  Simulator sim(sc);
  sim.run();
  return {sim.report(), sim.trace_csv()};
}

std::vector<RunOutput> run_batch(const std::vector<Scenario>& scenarios, int threads) {
  std::vector<RunOutput> out(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        out[i] = run_scenario(scenarios[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(scenarios.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<RunOutput> run_seed_sweep(const Scenario& sc, const std::vector<std::uint64_t>& seeds, int threads) {
  std::vector<Scenario> runs(seeds.size(), sc);
  for (std::size_t i = 0; i < seeds.size(); ++i) runs[i].seed = seeds[i];
  return run_batch(runs, threads);
}

}  // namespace catm::sim
