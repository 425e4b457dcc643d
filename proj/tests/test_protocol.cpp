#include <cmath>
#include <random>
#include <vector>

#include "catm/ue_protocol.hpp"
#include "doctest.h"

using namespace catm;
using namespace catm::ue;

TEST_SUITE("ue-protocol") {

TEST_CASE("half-duplex calendar forbids overlap and missing guard") {
  HalfDuplexCalendar c;
  CHECK_FALSE(c.book(10, 4, Direction::Downlink));
  CHECK(c.state(10) == Slot::Rx);
  CHECK(c.state(9) == Slot::Guard);
  CHECK(c.state(14) == Slot::Guard);
  CHECK(c.state(15) == Slot::Free);
  // Adjacent opposite direction needs a guard subframe.
  auto clash = c.book(14, 2, Direction::Uplink);
  REQUIRE(clash);
  CHECK(clash->tti == 14);
  // Same direction back to back is allowed.
  CHECK_FALSE(c.book(14, 1, Direction::Downlink));
  CHECK(c.book(15, 1, Direction::Uplink));
  CHECK_FALSE(c.book(16, 2, Direction::Uplink));
  CHECK(c.state(15) == Slot::Guard);
  c.audit();
  c.unbook(16, 2, Direction::Uplink);
  CHECK(c.state(17) == Slot::Free);
}

TEST_CASE("full-duplex calendar only forbids same-direction overlap") {
  HalfDuplexCalendar c(4096, true);
  CHECK_FALSE(c.book(0, 4, Direction::Downlink));
  CHECK_FALSE(c.book(0, 4, Direction::Uplink));
  CHECK(c.book(3, 1, Direction::Uplink));
}

TEST_CASE("randomised bookings never break the calendar audit") {
  std::mt19937_64 rng(3);
  HalfDuplexCalendar c(512);
  for (int i = 0; i < 5000; ++i) {
    const Tti now = i / 8;
    c.advance_to(now);
    const Tti first = now + static_cast<Tti>(rng() % 64);
    const int n = 1 + static_cast<int>(rng() % 8);
    const Direction d = rng() % 2 ? Direction::Uplink : Direction::Downlink;
    const bool dry = c.check(first, n, d).has_value();
    CHECK(c.book(first, n, d).has_value() == dry);
    if (i % 250 == 0) c.audit();
  }
  c.audit();
}

TEST_CASE("dormancy timer releases and resets power control and link adaptation") {
  PowerControlState pc;
  pc.mode = PowerControlMode::Clpc;
  const auto la = mac::LinkAdaptationState::with_target(0.1, 0.01);
  UeContext ue(7, pc, la);
  ue.dormancy_timer_ms = 100;

  RrcEvents arrive;
  arrive.data_arrival = true;
  auto s = step_rrc(ue, 0, arrive);
  CHECK(s.rach_initiated);
  CHECK(s.rach_start_tti == 1);
  CHECK_FALSE(step_rrc(ue, 1, arrive).rach_initiated);  // one RACH at a time

  RrcEvents done;
  done.rach_complete = true;
  s = step_rrc(ue, 20, done);
  CHECK(s.connected);
  CHECK(ue.rrc_state == RrcState::Connected);

  ue.pc.tpc_accum_db = 4.0;
  ue.la.olla_offset_db = -2.5;
  for (Tti t = 21; t < 120; ++t) CHECK_FALSE(step_rrc(ue, t, {}).released);
  s = step_rrc(ue, 120, {});
  CHECK(s.released);
  CHECK(ue.rrc_state == RrcState::Idle);
  CHECK(ue.pc == pc);
  CHECK(ue.la == la);
  CHECK_THROWS_AS(step_rrc(ue, 121, done), InvariantBreach);
}

TEST_CASE("DRX monitoring windows") {
  UeContext ue(0, {}, {});
  ue.rrc_state = RrcState::Connected;
  CHECK(ue.monitors_mpdcch(12345));
  ue.drx = DrxConfig{320, 10, 0};
  CHECK(ue.monitors_mpdcch(320));
  CHECK(ue.monitors_mpdcch(329));
  CHECK_FALSE(ue.monitors_mpdcch(330));
  CHECK(ue.next_monitoring_tti(330) == 640);
  ue.drx->inactivity_ms = 50;
  ue.last_activity_tti = 330;
  CHECK(ue.monitors_mpdcch(370));
  CHECK_FALSE(ue.monitors_mpdcch(380));
}

TEST_CASE("preamble detection improves with repetitions") {
  RachConfig r;
  CHECK(r.success_probability(145.0) == doctest::Approx(0.5));
  r.preamble_repetitions = 8;
  CHECK(r.success_probability(145.0 + 10 * std::log10(8.0)) == doctest::Approx(0.5));
  CHECK(r.success_probability(130.0) > 0.99);
  CHECK(rach_overhead(r) == 8 * r.prach_prbs);
  r.preamble_repetitions = 3;
  CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("configuration validation") {
  CqiConfig q;
  q.period_ms = 30;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  CeConfig ce{4, 6, 8, 8};
  CHECK_THROWS_AS(ce.validate(), ConfigError);
  PowerControlState pc;
  pc.p_max_dbm = 30.0;
  CHECK_THROWS_AS(pc.validate(), ConfigError);
}

}
