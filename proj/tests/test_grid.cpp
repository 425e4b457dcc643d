#include <random>
#include <vector>

#include "catm/resource_grid.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace catm;
using namespace catm::grid;

TEST_SUITE("resource-grid") {

TEST_CASE("RBG partition covers the carrier once") {
  for (int n : {6, 15, 25, 50, 75, 100})
    for (int g : {1, 2, 3, 4}) {
      const auto rbgs = BandwidthProfile::partition_rbgs(n, g);
      int next = 0;
      for (const auto& r : rbgs) {
        CHECK(r.first == next);
        CHECK(r.count >= 1);
        CHECK(r.count <= g);
        next = r.end();
      }
      CHECK(next == n);
    }
}

TEST_CASE("narrowband waste matches brute force for every builtin bandwidth") {
  const auto table = NarrowbandLayoutTable::builtin();
  for (const auto& p : table.profiles()) {
    CAPTURE(p.bandwidth_mhz);
    const auto plans = enumerate_narrowbands(p);
    REQUIRE(plans.size() == p.narrowband_starts.size());
    int best = 1 << 30, best_idx = -1;
    for (const auto& plan : plans) {
      const int w = oracle::narrowband_waste(p.total_prbs, p.rbg_size, plan.prb_range.first);
      CHECK(plan.wasted_prbs == w);
      if (w <= best) {
        best = w;
        best_idx = plan.nb_index;
      }
      CHECK(plan.prb_range.end() <= p.total_prbs);
    }
    CHECK(choose_narrowband(p).nb_index == best_idx);
  }
}

TEST_CASE("narrowbands never overlap") {
  for (int n : {6, 15, 25, 50, 75, 100}) {
    const auto starts = BandwidthProfile::standard_narrowband_starts(n);
    CHECK(static_cast<int>(starts.size()) == n / 6);
    for (std::size_t i = 1; i < starts.size(); ++i) CHECK(starts[i] >= starts[i - 1] + 6);
  }
}

TEST_CASE("layout table JSON round trip and unknown bandwidth") {
  const auto t = NarrowbandLayoutTable::builtin();
  const auto back = NarrowbandLayoutTable::from_json(t.to_json());
  CHECK(back.to_json() == t.to_json());
  CHECK_THROWS(t.profile(7.0));
}

TEST_CASE("reserve and release restore the grid exactly") {
  ResourceGrid g(50, {43, 6});
  const ResourceRequest reqs[] = {
      {ResourceKind::MpdcchUnits, 10, 4, {}, 8},
      {ResourceKind::UplinkPrbs, 17, 8, {43, 3}, 0},
  };
  auto r = g.reserve(reqs, {1, 0});
  REQUIRE(r);
  CHECK(g.mpdcch_free(10) == 16);
  CHECK(g.prbs_used(ResourceKind::UplinkPrbs, 20) == 3);
  CHECK(g.prb_used(ResourceKind::UplinkPrbs, 20, 44));
  CHECK_FALSE(g.prb_used(ResourceKind::DownlinkPrbs, 20, 44));
  g.audit();
  g.release(*r.id);
  CHECK(g.mpdcch_free(10) == 24);
  CHECK(g.prbs_used(ResourceKind::UplinkPrbs, 20) == 0);
  CHECK(g.active_reservations() == 0);
  g.audit();
}

TEST_CASE("reservations are all-or-nothing") {
  ResourceGrid g(50, {43, 6});
  REQUIRE(g.reserve({ResourceKind::DownlinkPrbs, 5, 2, {43, 6}, 0}, {1, 0}));
  const ResourceRequest both[] = {
      {ResourceKind::MpdcchUnits, 3, 1, {}, 4},
      {ResourceKind::DownlinkPrbs, 6, 1, {45, 1}, 0},  // collides
  };
  auto r = g.reserve(both, {2, 0});
  CHECK_FALSE(r);
  CHECK(r.rejection.binding == Binding::Prbs);
  CHECK(g.mpdcch_free(3) == 24);
  CHECK_THROWS_AS(g.reserve({ResourceKind::MpdcchUnits, 3, 1, {}, 0}, {2, 0}), InputError);
  CHECK_FALSE(g.reserve({ResourceKind::MpdcchUnits, 3, 1, {}, 25}, {2, 0}));
  // Outside the narrowband.
  CHECK_THROWS_AS(g.reserve({ResourceKind::UplinkPrbs, 3, 1, {0, 2}, 0}, {2, 0}), InputError);
}

TEST_CASE("find_free_prbs returns a placement that reserves") {
  ResourceGrid g(50, {43, 6});
  REQUIRE(g.reserve({ResourceKind::UplinkPrbs, 0, 10, {43, 2}, 0}, {1, 0}));
  auto p = g.find_free_prbs(ResourceKind::UplinkPrbs, 4, 4, 4);
  REQUIRE(p);
  CHECK(g.reserve({ResourceKind::UplinkPrbs, 4, 4, *p, 0}, {2, 0}));
  CHECK_FALSE(g.find_free_prbs(ResourceKind::UplinkPrbs, 4, 4, 1));
}

TEST_CASE("random reserve/release sequences keep the audit clean") {
  std::mt19937_64 rng(7);
  ResourceGrid g(50, {43, 6}, 24, 256);
  std::vector<ReservationId> live;
  for (int step = 0; step < 3000; ++step) {
    const Tti now = step / 10;
    g.advance_to(now);
    if (!live.empty() && rng() % 3 == 0) {
      const std::size_t i = rng() % live.size();
      g.release(live[i]);
      live.erase(live.begin() + static_cast<long>(i));
    } else {
      const int kind = static_cast<int>(rng() % 3);
      ResourceRequest r;
      r.first_tti = now + static_cast<Tti>(rng() % 40);
      r.num_ttis = 1 + static_cast<int>(rng() % 16);
      if (kind == 0) {
        r.kind = ResourceKind::MpdcchUnits;
        r.units = 2 << (rng() % 4);
      } else {
        r.kind = kind == 1 ? ResourceKind::UplinkPrbs : ResourceKind::DownlinkPrbs;
        const int c = 1 + static_cast<int>(rng() % 6);
        r.prbs = {43 + static_cast<int>(rng() % (7 - c)), c};
      }
      if (auto res = g.reserve(r, {static_cast<int>(rng() % 10), 0})) live.push_back(*res.id);
    }
    for (Tti t = now; t < now + 50; ++t) {
      CHECK(g.mpdcch_free(t) >= 0);
      CHECK(g.prbs_used(ResourceKind::UplinkPrbs, t) <= 6);
    }
    if (step % 100 == 0) g.audit();
  }
  g.audit();
  const auto& u = g.usage();
  CHECK(u.max_mpdcch_units_in_tti <= 24);
}

}
