#include <string>

#include "catm/radio_model.hpp"
#include "catm/resource_grid.hpp"
#include "catm/scenario.hpp"
#include "catm/simulator.hpp"
#include "catm/tbs_table.hpp"
#include "doctest.h"

using namespace catm;

namespace {
const std::string kData = CATM_SOURCE_DIR "/data/";
const std::string kScenarios = CATM_SOURCE_DIR "/scenarios/";
}  // namespace

TEST_SUITE("data-files") {

TEST_CASE("shipped tables equal the builtin ones") {
  CHECK(radio::BlerModel::load(kData + "bler_table.json") == radio::BlerModel::builtin());
  CHECK(TbsTable::load(kData + "tbs_table.json") == TbsTable::builtin());
  CHECK(grid::NarrowbandLayoutTable::load(kData + "narrowband_layout.json").to_json() ==
        grid::NarrowbandLayoutTable::builtin().to_json());
}

TEST_CASE("TBS table shape and capping") {
  const TbsTable t = TbsTable::builtin();
  for (int m = 0; m < TbsTable::kNumMcs; ++m)
    for (int n = 1; n <= 6; ++n) {
      CHECK(t.tbs(m, n) <= t.max_tbs());
      if (n > 1) CHECK(t.raw_tbs(m, n) > t.raw_tbs(m, n - 1));
      if (m > 0) CHECK(t.raw_tbs(m, n) >= t.raw_tbs(m - 1, n));
    }
  CHECK(t.prbs_for(0, 100000) == 0);
  const int n = t.prbs_for(5, 300);
  REQUIRE(n > 0);
  CHECK(t.tbs(5, n) >= 300);
  if (n > 1) CHECK(t.tbs(5, n - 1) < 300);
  CHECK_THROWS_AS(t.tbs(16, 1), ConfigError);
  CHECK(TbsTable::from_json(t.to_json()) == t);
}

TEST_CASE("example scenarios load and run briefly") {
  for (const char* f : {"single_ue.json", "mixed.json", "voip.json"}) {
    CAPTURE(f);
    sim::Scenario s = sim::load_scenario(kScenarios + f);
    s.duration_ms = 200;
    CHECK_NOTHROW(sim::run_scenario(s));
  }
}

TEST_CASE("scenario can point at the shipped tables") {
  sim::Scenario s = sim::load_scenario(kScenarios + "single_ue.json");
  s.duration_ms = 100;
  s.radio.bler_table = kData + "bler_table.json";
  s.radio.tbs_table = kData + "tbs_table.json";
  s.bandwidth.layout_table = kData + "narrowband_layout.json";
  CHECK_NOTHROW(sim::run_scenario(s));
  s.radio.tbs_table = kData + "missing.json";
  CHECK_THROWS_AS(sim::run_scenario(s), ConfigError);
}

}
