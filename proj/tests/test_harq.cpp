#include "catm/mac_scheduler.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace catm;
using namespace catm::mac;

TEST_SUITE("harq") {

TEST_CASE("uplink timeline offsets") {
  const Timeline t = derive_timeline({Direction::Uplink, 1, 1, 1}, 0);
  CHECK(t.mpdcch == TtiRange{0, 1});
  CHECK(t.data == TtiRange{4, 1});
  CHECK(t.ack.empty());
  CHECK(t.next_eligible == 8);
  const Timeline r = derive_timeline({Direction::Uplink, 4, 16, 1}, 100);
  CHECK(r.data.first == 100 + 3 + 4);
  CHECK(r.next_eligible == r.data.last() + 4);
}

TEST_CASE("downlink timeline offsets") {
  const Timeline t = derive_timeline({Direction::Downlink, 4, 8, 8}, 10);
  CHECK(t.mpdcch == TtiRange{10, 4});
  CHECK(t.data.first == 13 + 2);
  CHECK(t.ack.first == t.data.last() + 4);
  CHECK(t.ack.count == 8);
  CHECK(t.next_eligible == t.ack.last() + 4);
  CHECK_THROWS_AS(derive_timeline({Direction::Downlink, 3, 8, 8}, 0), ConfigError);
}

TEST_CASE("cycle helpers agree with the derived timeline") {
  for (int rm : {1, 2, 4, 8, 16, 32})
    for (int rd : {1, 2, 4, 8, 16, 32})
      for (int ra : {1, 4, 32}) {
        for (Direction d : {Direction::Uplink, Direction::Downlink}) {
          const Timeline t = derive_timeline({d, rm, rd, ra}, 0);
          CHECK(harq_cycle_ms(d, rm, rd, ra) == t.next_eligible);
          CHECK(data_end_offset(d, rm, rd) == t.data.end());
          const auto o = oracle::harq_occupancy(d == Direction::Uplink, rm, rd, ra);
          CHECK(o.cycle == t.next_eligible);
        }
      }
}

TEST_CASE("three half-duplex processes per 8 ms at RL 1, eight with full duplex") {
  CHECK(max_concurrent_harq(1, 1, 1, Direction::Uplink, 8, false) == 3);
  CHECK(max_concurrent_harq(1, 1, 1, Direction::Uplink, 8, true) == 8);
}

TEST_CASE("long data repetition leaves room for one process") {
  CHECK(max_concurrent_harq(1, 32, 1, Direction::Uplink, 8, false) == 1);
  CHECK(max_concurrent_harq(1, 1, 1, Direction::Uplink, 1, false) >= 1);
}

TEST_CASE("concurrency agrees with the brute-force enumerator on small ladders") {
  for (int rm : {1, 2, 4})
    for (int rd : {1, 2, 4, 8})
      for (bool fd : {false, true}) {
        CAPTURE(rm);
        CAPTURE(rd);
        CAPTURE(fd);
        CHECK(max_concurrent_harq(rm, rd, 1, Direction::Uplink, 8, fd) ==
              oracle::max_processes(true, rm, rd, 1, 8, fd));
        CHECK(max_concurrent_harq(rm, rd, 2, Direction::Downlink, 8, fd) ==
              oracle::max_processes(false, rm, rd, 2, 8, fd));
      }
}

TEST_CASE("AGL tiers") {
  AglTiers t;
  CHECK(t.agl_for(120.0) == 4);
  CHECK(t.agl_for(130.0) == 8);
  CHECK(t.agl_for(145.0) == 16);
  CHECK(t.agl_for(170.0) == 24);
  t.levels = {4, 8};
  CHECK_THROWS_AS(t.validate(), ConfigError);
}

}
