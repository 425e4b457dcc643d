#include "catm/mac_scheduler.hpp"

#include <algorithm>
#include <cmath>

namespace catm::mac {

Timeline derive_timeline(const TimelineParams& p, Tti start) {
  require_repetition(p.rl_mpdcch, "timeline rl_mpdcch");
  require_repetition(p.rl_data, "timeline rl_data");
  if (p.direction == Direction::Downlink) require_repetition(p.rl_ack, "timeline rl_ack");
  Timeline t;
  t.mpdcch = {start, p.rl_mpdcch};
  if (p.direction == Direction::Uplink) {
    t.data = {t.mpdcch.last() + kHarqOffsets.mpdcch_to_pusch, p.rl_data};
    t.next_eligible = t.data.last() + kHarqOffsets.data_to_feedback;
  } else {
    t.data = {t.mpdcch.last() + kHarqOffsets.mpdcch_to_pdsch, p.rl_data};
    t.ack = {t.data.last() + kHarqOffsets.data_to_feedback, p.rl_ack};
    t.next_eligible = t.ack.last() + kHarqOffsets.data_to_feedback;
  }
  return t;
}

// ---------------------------------------------------------------------------

namespace {

struct CyclicCalendar {
  int period;
  bool full_duplex;
  std::vector<std::uint8_t> rx, tx;

  CyclicCalendar(int p, bool fd) : period(p), full_duplex(fd), rx(p, 0), tx(p, 0) {}

  int wrap(Tti t) const { return static_cast<int>(((t % period) + period) % period); }

  bool blocked(int s, bool want_tx) const {
    if (want_tx ? tx[s] : rx[s]) return true;
    if (full_duplex) return false;
    if (want_tx ? rx[s] : tx[s]) return true;
    const auto& other = want_tx ? rx : tx;
    return other[wrap(s - 1)] || other[wrap(s + 1)];
  }
};

struct ProcessPattern {
  std::vector<int> rx_offsets;
  std::vector<int> tx_offsets;
};

ProcessPattern pattern_for(const Timeline& tl, Direction dir) {
  ProcessPattern p;
  for (Tti t = tl.mpdcch.first; t < tl.mpdcch.end(); ++t) p.rx_offsets.push_back(static_cast<int>(t));
  for (Tti t = tl.data.first; t < tl.data.end(); ++t)
    (dir == Direction::Uplink ? p.tx_offsets : p.rx_offsets).push_back(static_cast<int>(t));
  for (Tti t = tl.ack.first; t < tl.ack.end(); ++t) p.tx_offsets.push_back(static_cast<int>(t));
  return p;
}

// Places the pattern at `shift` if possible. Checks each slot against the calendar
// before any of this process's own slots are written, then writes them all.
bool try_place(CyclicCalendar& cal, const ProcessPattern& p, int shift) {
  for (int o : p.rx_offsets)
    if (cal.blocked(cal.wrap(o + shift), false)) return false;
  for (int o : p.tx_offsets)
    if (cal.blocked(cal.wrap(o + shift), true)) return false;
  // The process's own RX and TX must also respect the guard against each other.
  CyclicCalendar probe = cal;
  for (int o : p.rx_offsets) probe.rx[probe.wrap(o + shift)] = 1;
  for (int o : p.tx_offsets)
    if (probe.blocked(probe.wrap(o + shift), true)) return false;
  cal = std::move(probe);
  for (int o : p.tx_offsets) cal.tx[cal.wrap(o + shift)] = 1;
  return true;
}

void search(const CyclicCalendar& cal, const ProcessPattern& p, int next_shift, int placed, int& best) {
  best = std::max(best, placed);
  for (int s = next_shift; s < cal.period; ++s) {
    CyclicCalendar c = cal;
    if (try_place(c, p, s)) search(c, p, s + 1, placed + 1, best);
  }
}

}  // namespace

int max_concurrent_harq(int rl_mpdcch, int rl_data, int rl_ack, Direction dir, int period_ms, bool full_duplex) {
  if (period_ms <= 0) throw InputError("max_concurrent_harq: period must be positive");
  const Timeline tl = derive_timeline({dir, rl_mpdcch, rl_data, rl_ack}, 0);
  const int period = std::max<int>(period_ms, static_cast<int>(tl.next_eligible));
  const ProcessPattern pattern = pattern_for(tl, dir);
  CyclicCalendar cal(period, full_duplex);
  // Rotation symmetry: the first process sits at offset 0.
  if (!try_place(cal, pattern, 0)) return 0;
  int best = 1;
  search(cal, pattern, 1, 1, best);
  return best;
}

// ---------------------------------------------------------------------------

int AglTiers::agl_for(double cl) const {
  for (std::size_t i = 0; i < upper_bounds_db.size(); ++i)
    if (cl < upper_bounds_db[i]) return levels[i];
  return levels.back();
}

void AglTiers::validate() const {
  if (levels.size() != upper_bounds_db.size() + 1) throw ConfigError("AGL tiers: need one more level than bounds");
  for (std::size_t i = 1; i < upper_bounds_db.size(); ++i)
    if (upper_bounds_db[i] <= upper_bounds_db[i - 1]) throw ConfigError("AGL tiers: bounds must increase");
  for (int l : levels)
    if (l != 2 && l != 4 && l != 8 && l != 16 && l != 24) throw ConfigError("AGL must be one of 2,4,8,16,24");
}

double LinkQuality::tx_power_dbm(int n_prbs) const {
  if (direction == Direction::Uplink) return ue::tx_power(ue_pc, coupling_loss_db, n_prbs);
  return enb_power_per_prb_dbm + 10.0 * std::log10(n_prbs);
}

double LinkQuality::sinr_db(int n_prbs) const {
  const double nf = direction == Direction::Uplink ? radio::kEnbNoiseFigureDb : radio::kUeNoiseFigureDb;
  const double noise_mw = std::pow(10.0, radio::noise_dbm(n_prbs, nf) / 10.0);
  const double interf_mw = std::pow(10.0, (interference_dbm + 10.0 * std::log10(n_prbs)) / 10.0);
  return tx_power_dbm(n_prbs) - coupling_loss_db - 10.0 * std::log10(noise_mw + interf_mw);
}

double predict_bler(const LinkQuality& link, double olla_offset_db, int mcs, int n_prbs, int rl_data,
                    const radio::BlerModel& bler, const TbsTable& tbs) {
  const double eff = radio::effective_sinr_db(link.sinr_db(n_prbs) + olla_offset_db, rl_data,
                                              bler.combining_penalty_db_per_doubling());
  return bler.bler(eff, mcs, tbs.tbs(mcs, n_prbs));
}

TransmissionChoice select_transmission(const LinkQuality& link, const LinkAdaptationState& la, int queue_bits,
                                       const radio::BlerModel& bler, const TbsTable& tbs,
                                       const SelectionOptions& opts) {
  if (queue_bits <= 0) throw InputError("select_transmission: queue must hold data");
  require_repetition(opts.rl_cap, "select_transmission rl_cap");
  if (opts.fixed_rl) require_repetition(*opts.fixed_rl, "select_transmission fixed_rl");
  const int need = std::min(queue_bits, tbs.max_tbs());
  const int num_mcs = std::min(bler.num_mcs(), TbsTable::kNumMcs);
  const double penalty = bler.combining_penalty_db_per_doubling();

  if (opts.use_initial_mcs) {
    TransmissionChoice c;
    c.mcs = std::clamp(la.initial_mcs, 0, num_mcs - 1);
    c.rl_data = opts.fixed_rl.value_or(opts.fallback_rl);
    c.n_prbs = tbs.prbs_for(c.mcs, need);
    if (c.n_prbs == 0) c.n_prbs = kMaxNarrowbandPrbs;
    c.tbs_bits = tbs.tbs(c.mcs, c.n_prbs);
    c.predicted_bler = predict_bler(link, la.olla_offset_db, c.mcs, c.n_prbs, c.rl_data, bler, tbs);
    return c;
  }

  std::array<double, kMaxNarrowbandPrbs> sinr{};
  for (int n = 1; n <= kMaxNarrowbandPrbs; ++n) sinr[n - 1] = link.sinr_db(n) + la.olla_offset_db;

  const int count = num_mcs * kMaxNarrowbandPrbs;
  std::vector<double> eff(count), tb(count), out(count);
  std::vector<int> mcs_idx(count);
  for (int m = 0; m < num_mcs; ++m)
    for (int n = 1; n <= kMaxNarrowbandPrbs; ++n) {
      const int i = m * kMaxNarrowbandPrbs + (n - 1);
      mcs_idx[i] = m;
      tb[i] = tbs.tbs(m, n);
    }

  auto evaluate = [&](int rl) {
    for (int m = 0; m < num_mcs; ++m)
      for (int n = 1; n <= kMaxNarrowbandPrbs; ++n)
        eff[m * kMaxNarrowbandPrbs + (n - 1)] = radio::combined_sinr_db(sinr[n - 1], rl, penalty);
    bler.bler_batch(eff, mcs_idx, tb, out);
  };

  const int rl_lo = opts.fixed_rl.value_or(1);
  const int rl_hi = opts.fixed_rl.value_or(opts.rl_cap);
  for (int rl = rl_lo; rl <= rl_hi; rl *= 2) {
    evaluate(rl);
    std::optional<int> covering, largest;
    for (int i = 0; i < count; ++i) {
      if (out[i] > la.ibler_target) continue;
      if (tb[i] >= need) {
        // Lowest MCS covering the need; fewer PRBs on ties (index order does both).
        if (!covering) covering = i;
      }
      if (!largest || tb[i] > tb[*largest] || (tb[i] == tb[*largest] && out[i] < out[*largest])) largest = i;
    }
    if (auto pick = covering ? covering : largest) {
      TransmissionChoice c;
      c.mcs = mcs_idx[*pick];
      c.n_prbs = *pick % kMaxNarrowbandPrbs + 1;
      c.tbs_bits = static_cast<int>(tb[*pick]);
      c.rl_data = rl;
      c.predicted_bler = out[*pick];
      return c;
    }
  }

  // Coverage-limited: most robust format at the top of the allowed ladder.
  evaluate(rl_hi);
  int best = 0;
  for (int i = 0; i < count; ++i)
    if (out[i] < out[best]) best = i;
  TransmissionChoice c;
  c.mcs = mcs_idx[best];
  c.n_prbs = best % kMaxNarrowbandPrbs + 1;
  c.tbs_bits = static_cast<int>(tb[best]);
  c.rl_data = rl_hi;
  c.predicted_bler = out[best];
  c.coverage_limited = true;
  return c;
}

// ---------------------------------------------------------------------------

int voip_aggregation_factor(const TimelineParams& rl, int voice_period_ms) {
  if (voice_period_ms <= 0) throw InputError("voice period must be positive");
  const int cycle = harq_cycle_ms(rl.direction, rl.rl_mpdcch, rl.rl_data, rl.rl_ack);
  return std::max(1, (cycle + voice_period_ms - 1) / voice_period_ms);
}

VoipBuild voip_build(std::span<const VoipPacket> queue, const VoipBuildConfig& cfg, Tti now) {
  if (queue.empty()) throw InputError("voip_build: empty queue");
  if (cfg.max_tbs_bits <= 0) throw InputError("voip_build: max TBS must be positive");
  VoipBuild out;
  out.aggregation_factor = cfg.aggregation ? voip_aggregation_factor(cfg.rl, cfg.voice_period_ms) : 1;
  const double first_delivery = data_end_offset(cfg.rl.direction, cfg.rl.rl_mpdcch, cfg.rl.rl_data);

  std::vector<const VoipPacket*> eligible;
  for (const VoipPacket& p : queue) {
    const double delay_if_sent = static_cast<double>(now - p.arrival_tti) + first_delivery;
    if (delay_if_sent > cfg.delay_budget_ms)
      out.budget_violated.push_back(p.id);
    else
      eligible.push_back(&p);
  }
  if (eligible.empty()) return out;
  std::stable_sort(eligible.begin(), eligible.end(),
                   [](const VoipPacket* a, const VoipPacket* b) { return a->arrival_tti < b->arrival_tti; });

  const bool has_sid = std::any_of(eligible.begin(), eligible.end(), [](const VoipPacket* p) { return p->sid; });
  const double oldest_wait = static_cast<double>(now - eligible.front()->arrival_tti);
  const bool cannot_wait = oldest_wait + cfg.voice_period_ms + first_delivery > cfg.delay_budget_ms;
  out.ready = static_cast<int>(eligible.size()) >= out.aggregation_factor || has_sid || cannot_wait;
  if (!out.ready) return out;

  const std::size_t take = std::min<std::size_t>(eligible.size(), static_cast<std::size_t>(out.aggregation_factor));
  TransportBlockPlan whole;
  for (std::size_t i = 0; i < take; ++i) {
    whole.packet_ids.push_back(eligible[i]->id);
    whole.size_bits += eligible[i]->size_bits;
  }
  if (whole.size_bits <= cfg.max_tbs_bits) {
    out.blocks.push_back(std::move(whole));
    return out;
  }
  const int segments = (whole.size_bits + cfg.max_tbs_bits - 1) / cfg.max_tbs_bits;
  const int seg_bits = (whole.size_bits + segments - 1) / segments;
  for (int s = 0; s < segments; ++s) {
    TransportBlockPlan b;
    b.packet_ids = whole.packet_ids;
    b.size_bits = seg_bits;
    b.segment = s;
    b.segments = segments;
    out.blocks.push_back(std::move(b));
  }
  return out;
}

// ---------------------------------------------------------------------------

CommitResult commit_grant(const GrantRequest& req, Tti start, grid::ResourceGrid& grid,
                          ue::HalfDuplexCalendar& calendar) {
  CommitResult res;
  const bool data = req.kind == GrantKind::Data;
  const Timeline tl = derive_timeline({req.direction, req.rl_mpdcch, data ? req.rl_data : 1, req.rl_ack}, start);

  for (Tti t = tl.mpdcch.first; t < tl.mpdcch.end(); ++t) {
    if (t >= grid.horizon_end()) {
      res.failure = CommitFailure::Horizon;
      return res;
    }
    if (grid.mpdcch_free(t) < req.agl) {
      res.failure = CommitFailure::MpdcchPool;
      return res;
    }
  }

  struct Booked {
    TtiRange r;
    Direction d;
  };
  std::vector<Booked> booked;
  auto rollback = [&] {
    for (const Booked& b : booked) calendar.unbook(b.r.first, b.r.count, b.d);
  };
  auto book = [&](TtiRange r, Direction d) {
    if (r.empty()) return true;
    if (calendar.book(r.first, r.count, d)) return false;
    booked.push_back({r, d});
    return true;
  };

  // Calendar directions: RX = Downlink, TX = Uplink.
  bool ok = book(tl.mpdcch, Direction::Downlink);
  if (ok && data) ok = book(tl.data, req.direction);
  if (ok && data && req.direction == Direction::Downlink) ok = book(tl.ack, Direction::Uplink);
  if (!ok) {
    rollback();
    res.failure = CommitFailure::HalfDuplex;
    return res;
  }

  std::vector<grid::ResourceRequest> rr;
  rr.push_back({grid::ResourceKind::MpdcchUnits, tl.mpdcch.first, tl.mpdcch.count, {}, req.agl});
  grid::PrbRange prbs{};
  if (data) {
    const auto kind = req.direction == Direction::Uplink ? grid::ResourceKind::UplinkPrbs
                                                         : grid::ResourceKind::DownlinkPrbs;
    auto free = grid.find_free_prbs(kind, tl.data.first, tl.data.count, req.n_prbs);
    if (!free) {
      rollback();
      res.failure = tl.data.end() > grid.horizon_end() ? CommitFailure::Horizon : CommitFailure::Prbs;
      return res;
    }
    prbs = *free;
    rr.push_back({kind, tl.data.first, tl.data.count, prbs, 0});
  }
  const auto reserved = grid.reserve(rr, {req.ue_id, req.harq_process});
  if (!reserved) {
    rollback();
    switch (reserved.rejection.binding) {
      case grid::Binding::MpdcchPool: res.failure = CommitFailure::MpdcchPool; break;
      case grid::Binding::Prbs: res.failure = CommitFailure::Prbs; break;
      default: res.failure = CommitFailure::Horizon; break;
    }
    return res;
  }

  Grant g;
  g.ue_id = req.ue_id;
  g.kind = req.kind;
  g.direction = req.direction;
  g.harq_process = req.harq_process;
  g.mcs = req.mcs;
  g.tbs_bits = req.tbs_bits;
  g.n_prbs = data ? req.n_prbs : 0;
  g.agl = req.agl;
  g.rl_mpdcch = req.rl_mpdcch;
  g.rl_data = data ? req.rl_data : 0;
  g.rl_ack = req.rl_ack;
  g.prbs = prbs;
  g.timeline = tl;
  g.reservation = *reserved.id;
  res.grant = g;
  return res;
}

std::vector<Grant> schedule_tti(std::vector<Candidate> candidates, grid::ResourceGrid& grid, Tti tti,
                                ScheduleStats* stats) {
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.order_key < b.order_key;
  });
  std::vector<Grant> grants;
  ScheduleStats local;
  for (Candidate& c : candidates) {
    if (c.calendar == nullptr) throw InputError("schedule_tti: candidate without a UE calendar");
    ++local.attempted;
    CommitResult r = commit_grant(c.request, tti, grid, *c.calendar);
    switch (r.failure) {
      case CommitFailure::None:
        ++local.committed;
        grants.push_back(*r.grant);
        break;
      case CommitFailure::MpdcchPool: ++local.blocked_mpdcch; break;
      case CommitFailure::Prbs:
      case CommitFailure::Horizon: ++local.blocked_prbs; break;
      case CommitFailure::HalfDuplex: ++local.blocked_half_duplex; break;
    }
  }
  if (stats) *stats = local;
  return grants;
}

}  // namespace catm::mac
