#include <algorithm>
#include <cmath>

#include "catm/layout.hpp"
#include "doctest.h"

using namespace catm;
using namespace catm::sim;

namespace {

Scenario layout_scenario(int rings, int ues, int sectors = 3) {
  Scenario s;
  s.layout.rings = rings;
  s.layout.sectors = sectors;
  UeGroup g;
  g.count = ues;
  s.ue_groups.push_back(g);
  return s;
}

}  // namespace

TEST_SUITE("layout") {

TEST_CASE("site counts and spacing") {
  CHECK(site_count(0) == 1);
  CHECK(site_count(1) == 7);
  CHECK(site_count(2) == 19);
  for (int rings : {1, 2}) {
    const auto sites = hex_sites(rings, 500.0);
    REQUIRE(static_cast<int>(sites.size()) == site_count(rings));
    CHECK(sites[0].x_m == 0.0);
    CHECK(sites[0].y_m == 0.0);
    // Every site has its nearest neighbour at exactly one ISD.
    for (std::size_t i = 0; i < sites.size(); ++i) {
      double nearest = 1e18;
      for (std::size_t j = 0; j < sites.size(); ++j)
        if (i != j) nearest = std::min(nearest, std::hypot(sites[i].x_m - sites[j].x_m, sites[i].y_m - sites[j].y_m));
      CHECK(nearest == doctest::Approx(500.0));
    }
  }
  // First ring: six sites at one ISD from the centre.
  const auto s1 = hex_sites(1, 500.0);
  for (std::size_t i = 1; i < 7; ++i) CHECK(std::hypot(s1[i].x_m, s1[i].y_m) == doctest::Approx(500.0));
}

TEST_CASE("each UE attaches to its minimum coupling-loss cell") {
  for (int rings : {1, 2}) {
    const Scenario sc = layout_scenario(rings, 3 * site_count(rings) * 4);
    const Layout l = build_layout(sc);
    CHECK(l.cells.size() == 3 * l.sites.size());
    for (const auto& u : l.ues) {
      REQUIRE(u.coupling_loss_db.size() == l.cells.size());
      const auto best = std::min_element(u.coupling_loss_db.begin(), u.coupling_loss_db.end());
      CHECK(u.coupling_loss_db[u.serving_cell] == *best);
      CHECK(u.serving_link.coupling_loss_db == doctest::Approx(*best));
      const auto& site = l.sites[l.cells[u.drop_cell].site];
      CHECK(std::hypot(u.x_m - site.x_m, u.y_m - site.y_m) >= sc.layout.min_distance_m - 1e-9);
    }
  }
}

TEST_CASE("drops land in their cell's sector wedge") {
  const Scenario sc = layout_scenario(1, 210);
  const Layout l = build_layout(sc);
  for (const auto& u : l.ues) {
    const Cell& c = l.cells[u.drop_cell];
    const Site& s = l.sites[c.site];
    double off = std::fmod(site_azimuth_deg(s, u.x_m, u.y_m, 1, 500.0, false) - c.boresight_deg + 540.0, 360.0) - 180.0;
    CHECK(std::abs(off) <= 60.0 + 1e-9);
    CHECK(std::hypot(u.x_m - s.x_m, u.y_m - s.y_m) <= 500.0 / std::sqrt(3.0) + 1e-9);
  }
}

TEST_CASE("wraparound never increases the distance") {
  const auto sites = hex_sites(1, 500.0);
  for (double x = -900.0; x <= 900.0; x += 150.0)
    for (double y = -900.0; y <= 900.0; y += 150.0)
      for (const auto& s : sites)
        CHECK(site_distance_m(s, x, y, 1, 500.0, true) <= site_distance_m(s, x, y, 1, 500.0, false) + 1e-9);
}

TEST_CASE("pinned coupling loss fixes the serving link") {
  Scenario sc = layout_scenario(0, 3, 1);
  sc.ue_groups[0].coupling_loss_db = 150.0;
  const Layout l = build_layout(sc);
  for (int u = 0; u < 3; ++u) CHECK(l.serving_cl(u) == doctest::Approx(150.0));
}

TEST_CASE("drops are reproducible per seed") {
  Scenario sc = layout_scenario(1, 21);
  const Layout a = build_layout(sc), b = build_layout(sc);
  sc.seed = 2;
  const Layout c = build_layout(sc);
  for (std::size_t i = 0; i < a.ues.size(); ++i) {
    CHECK(a.ues[i].x_m == b.ues[i].x_m);
    CHECK(a.ues[i].coupling_loss_db == b.ues[i].coupling_loss_db);
  }
  CHECK(a.ues[0].x_m != c.ues[0].x_m);
}

TEST_CASE("empty population is a configuration error") {
  Scenario sc = layout_scenario(0, 1, 1);
  sc.ue_groups[0].count = 0;
  CHECK_THROWS_AS(build_layout(sc), ConfigError);
}

}
