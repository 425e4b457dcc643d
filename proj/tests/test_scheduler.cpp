#include <algorithm>
#include <cmath>
#include <vector>

#include "catm/mac_scheduler.hpp"
#include "doctest.h"

using namespace catm;
using namespace catm::mac;

namespace {

GrantRequest request(int ue, int agl, Direction d = Direction::Uplink) {
  GrantRequest r;
  r.ue_id = ue;
  r.direction = d;
  r.harq_process = 0;
  r.agl = agl;
  r.n_prbs = 1;
  r.tbs_bits = 56;
  return r;
}

LinkQuality ul_link(double cl) {
  LinkQuality l;
  l.direction = Direction::Uplink;
  l.coupling_loss_db = cl;
  l.ue_pc.p0_dbm = -100.0;
  l.ue_pc.p_max_dbm = 20.0;
  return l;
}

}  // namespace

TEST_SUITE("mac-scheduler") {

TEST_CASE("outer loop step sizes balance at the target") {
  const auto la = LinkAdaptationState::with_target(0.10, 0.01);
  CHECK(la.step_down_db == doctest::Approx(0.09));
  // Expected drift at exactly the target NACK rate is zero.
  CHECK(0.9 * la.step_up_db - 0.1 * la.step_down_db == doctest::Approx(0.0));
  auto s = la;
  for (int i = 0; i < 10000; ++i) outer_loop_update(s, true);
  CHECK(s.olla_offset_db == doctest::Approx(kOllaClampDb));
  for (int i = 0; i < 10000; ++i) outer_loop_update(s, false);
  CHECK(s.olla_offset_db == doctest::Approx(-kOllaClampDb));
  CHECK_THROWS(LinkAdaptationState::with_target(0.0, 0.01).validate());
}

TEST_CASE("selection meets the BLER target with the least repetition") {
  const auto bler = radio::BlerModel::builtin();
  const auto tbs = TbsTable::builtin();
  const auto la = LinkAdaptationState::with_target(0.10, 0.01);
  int prev_rl = 0;
  for (double cl = 110.0; cl <= 155.0; cl += 5.0) {
    CAPTURE(cl);
    const auto c = select_transmission(ul_link(cl), la, 1000, bler, tbs);
    CHECK(c.tbs_bits == tbs.tbs(c.mcs, c.n_prbs));
    CHECK(c.rl_data >= prev_rl);
    prev_rl = c.rl_data;
    if (!c.coverage_limited) {
      CHECK(c.predicted_bler <= la.ibler_target + 1e-12);
      if (c.rl_data > 1) {
        // Nothing at half the repetition meets the target.
        bool any = false;
        for (int m = 0; m < TbsTable::kNumMcs; ++m)
          for (int n = 1; n <= 6; ++n)
            any = any || predict_bler(ul_link(cl), 0.0, m, n, c.rl_data / 2, bler, tbs) <= la.ibler_target;
        CHECK_FALSE(any);
      }
    }
  }
}

TEST_CASE("selection honours fixed RL, RL cap and initial MCS") {
  const auto bler = radio::BlerModel::builtin();
  const auto tbs = TbsTable::builtin();
  auto la = LinkAdaptationState::with_target(0.10, 0.01, 4);
  SelectionOptions o;
  o.fixed_rl = 16;
  CHECK(select_transmission(ul_link(120.0), la, 500, bler, tbs, o).rl_data == 16);
  o = {};
  o.rl_cap = 4;
  const auto capped = select_transmission(ul_link(160.0), la, 500, bler, tbs, o);
  CHECK(capped.rl_data <= 4);
  CHECK(capped.coverage_limited);
  o = {};
  o.use_initial_mcs = true;
  o.fallback_rl = 8;
  const auto init = select_transmission(ul_link(130.0), la, 200, bler, tbs, o);
  CHECK(init.mcs == 4);
  CHECK(init.rl_data == 8);
  CHECK(init.tbs_bits >= 200);
  CHECK_THROWS_AS(select_transmission(ul_link(130.0), la, 0, bler, tbs), InputError);
}

TEST_CASE("VoIP aggregation factor follows the HARQ cycle") {
  CHECK(voip_aggregation_factor({Direction::Uplink, 1, 1, 1}, 20) == 1);
  // RL 4/8: cycle 3 + 4 + 8 - 1 + 4 = 18 -> 1; RL 4/16 -> 26 -> 2; RL 4/32 -> 42 -> 3.
  CHECK(voip_aggregation_factor({Direction::Uplink, 4, 8, 1}, 20) == 1);
  CHECK(voip_aggregation_factor({Direction::Uplink, 4, 16, 1}, 20) == 2);
  CHECK(voip_aggregation_factor({Direction::Uplink, 4, 32, 1}, 20) == 3);
}

TEST_CASE("VoIP build waits, aggregates, segments and flags late packets") {
  VoipBuildConfig cfg;
  cfg.rl = {Direction::Uplink, 4, 32, 1};
  std::vector<VoipPacket> q{{1, 0, 320, false}};
  auto b = voip_build(q, cfg, 0);
  CHECK(b.aggregation_factor == 3);
  CHECK_FALSE(b.ready);
  q.push_back({2, 20, 320, false});
  q.push_back({3, 40, 320, false});
  b = voip_build(q, cfg, 40);
  REQUIRE(b.ready);
  REQUIRE(b.blocks.size() == 1);
  CHECK(b.blocks[0].size_bits == 960);
  CHECK(b.blocks[0].packet_ids == std::vector<std::int64_t>{1, 2, 3});

  cfg.max_tbs_bits = 500;
  b = voip_build(q, cfg, 40);
  REQUIRE(b.blocks.size() == 2);
  for (const auto& blk : b.blocks) {
    CHECK(blk.segments == 2);
    CHECK(blk.size_bits <= 500);
  }

  // A packet that would finish past the budget is reported, not sent.
  cfg.max_tbs_bits = 1000;
  std::vector<VoipPacket> late{{9, 0, 320, false}, {10, 40, 320, false}};
  b = voip_build(late, cfg, 190);
  CHECK(b.budget_violated == std::vector<std::int64_t>{9});
  // The remaining one cannot wait another voice period, so it goes alone.
  CHECK(b.ready);

  // SID packets are never held back.
  std::vector<VoipPacket> sid{{5, 0, 120, true}};
  CHECK(voip_build(sid, cfg, 0).ready);
}

TEST_CASE("a committed grant books the whole timeline atomically") {
  grid::ResourceGrid g(50, {43, 6});
  ue::HalfDuplexCalendar cal;
  auto req = request(0, 8, Direction::Downlink);
  req.rl_mpdcch = 2;
  req.rl_data = 4;
  req.rl_ack = 2;
  req.n_prbs = 3;
  const auto r = commit_grant(req, 10, g, cal);
  REQUIRE(r.grant);
  const Timeline& t = r.grant->timeline;
  CHECK(g.mpdcch_free(10) == 16);
  CHECK(g.prbs_used(grid::ResourceKind::DownlinkPrbs, t.data.first) == 3);
  CHECK(cal.state(t.data.first) == ue::Slot::Rx);
  CHECK(cal.state(t.ack.first) == ue::Slot::Tx);
  cal.audit();
  g.audit();

  // Same UE, overlapping timeline in the other direction: rejected and nothing leaks.
  const int before = g.mpdcch_free(t.ack.first);
  const auto clash = commit_grant(request(0, 4), t.ack.first - 4, g, cal);
  CHECK_FALSE(clash.grant);
  CHECK(clash.failure == CommitFailure::HalfDuplex);
  CHECK(g.mpdcch_free(t.ack.first) == before);
  cal.audit();
}

TEST_CASE("MPDCCH pool of 24 units per TTI") {
  grid::ResourceGrid g(50, {43, 6});
  std::vector<ue::HalfDuplexCalendar> cals(4);
  auto cand = [&](int ue, int agl) {
    Candidate c;
    c.priority = Priority::Bursty;
    c.order_key = ue;
    c.request = request(ue, agl);
    c.calendar = &cals[static_cast<std::size_t>(ue)];
    return c;
  };
  ScheduleStats st;
  auto grants = schedule_tti({cand(0, 24), cand(1, 4), cand(2, 2)}, g, 0, &st);
  CHECK(grants.size() == 1);
  CHECK(st.blocked_mpdcch == 2);

  grid::ResourceGrid g2(50, {43, 6});
  std::vector<ue::HalfDuplexCalendar> cals2(3);
  std::vector<Candidate> c2;
  for (int i = 0; i < 3; ++i) {
    c2.push_back(cand(i, i == 2 ? 4 : 8));
    c2.back().calendar = &cals2[static_cast<std::size_t>(i)];
  }
  grants = schedule_tti(c2, g2, 0);
  CHECK(grants.size() == 3);
  CHECK(g2.mpdcch_free(0) == 4);
}

TEST_CASE("retransmissions outrank new data") {
  grid::ResourceGrid g(50, {43, 6});
  std::vector<ue::HalfDuplexCalendar> cals(2);
  Candidate bursty, retx;
  bursty.priority = Priority::Bursty;
  bursty.request = request(0, 16);
  bursty.calendar = &cals[0];
  retx.priority = Priority::HarqRetransmission;
  retx.request = request(1, 16);
  retx.calendar = &cals[1];
  const auto grants = schedule_tti({bursty, retx}, g, 0);
  REQUIRE(grants.size() == 1);
  CHECK(grants[0].ue_id == 1);
}

}
