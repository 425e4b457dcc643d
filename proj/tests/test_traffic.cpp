#include <cmath>
#include <limits>

#include "catm/traffic.hpp"
#include "doctest.h"

using namespace catm;
using namespace catm::traffic;

TEST_SUITE("traffic") {

TEST_CASE("bursty inter-arrival obeys the shifted exponential") {
  auto s = TrafficSource::bursty({}, 42, 0);
  const int n = 200000;
  double sum = 0.0, sq = 0.0, mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x = s.draw_interarrival_ms();
    sum += x;
    sq += (x - 2500.0) * (x - 2500.0);
    mn = std::min(mn, x);
  }
  CHECK(sum / n == doctest::Approx(10000.0).epsilon(0.01));
  CHECK(mn >= 2500.0);
  // Exponential part: variance equals its squared mean (second moment 2 mu^2).
  CHECK(sq / n == doctest::Approx(2.0 * 7500.0 * 7500.0).epsilon(0.03));
}

TEST_CASE("arrivals are strictly increasing and sized from the parameters") {
  BurstyParams p;
  p.header_bits = 24;
  auto s = TrafficSource::bursty(p, 1, 5);
  double prev = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto e = s.next_event();
    CHECK(e.arrival_ms > prev);
    CHECK(e.size_bits == 1024);
    CHECK(e.direction == Direction::Uplink);
    prev = e.arrival_ms;
  }
}

TEST_CASE("streams are reproducible and independent") {
  auto a = TrafficSource::bursty({}, 9, 1);
  auto b = TrafficSource::bursty({}, 9, 1);
  auto c = TrafficSource::bursty({}, 9, 2);
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = a.draw_interarrival_ms();
    CHECK(x == b.draw_interarrival_ms());
    same += x == c.draw_interarrival_ms();
  }
  CHECK(same == 0);
  CHECK(make_stream(1, 2)() != make_stream(2, 1)());
}

TEST_CASE("VoIP source: voice on the 20 ms grid, SID every 160 ms, ~50% activity") {
  auto s = TrafficSource::voip({}, 3, 0);
  const double horizon = 2.0e6;
  double prev = -1.0;
  long voice_ul = 0, voice_dl = 0, sid = 0;
  while (s.peek_ms() < horizon) {
    const auto e = s.next_event();
    CHECK(e.arrival_ms > prev);
    prev = e.arrival_ms;
    CHECK(e.sid != e.voice);
    if (e.voice) {
      CHECK(e.size_bits == 320);
      (e.direction == Direction::Uplink ? voice_ul : voice_dl)++;
    } else {
      CHECK(e.size_bits == 120);
      ++sid;
    }
  }
  const double per_dir = horizon / 20.0 / 2.0;  // each party talks half of the time
  CHECK(voice_ul == doctest::Approx(per_dir).epsilon(0.05));
  CHECK(voice_dl == doctest::Approx(per_dir).epsilon(0.05));
  CHECK(sid == doctest::Approx(horizon / 160.0).epsilon(0.1));
}

TEST_CASE("full buffer has no discrete arrivals") {
  auto s = TrafficSource::full_buffer({});
  CHECK(std::isinf(s.peek_ms()));
  CHECK_THROWS_AS(s.next_event(), InputError);
}

TEST_CASE("parameter validation") {
  BurstyParams p;
  p.min_interarrival_ms = 20000.0;
  CHECK_THROWS_AS(TrafficSource::bursty(p, 1, 0), ConfigError);
  VoipParams v;
  v.voice_period_ms = 0;
  CHECK_THROWS_AS(TrafficSource::voip(v, 1, 0), ConfigError);
}

}
