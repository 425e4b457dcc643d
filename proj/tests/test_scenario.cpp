#include <string>

#include "catm/scenario.hpp"
#include "doctest.h"

using namespace catm;
using namespace catm::sim;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "name": "t", "seed": 3, "duration_ms": 1000,
    "ue_groups": [ { "name": "meters", "count": 4, "traffic": { "kind": "bursty" } } ]
  })");
}

std::string error_of(const json& doc) {
  try {
    scenario_from_json(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("defaults fill everything not given") {
  const Scenario s = scenario_from_json(minimal());
  CHECK(s.seed == 3);
  CHECK(s.total_ues() == 4);
  CHECK(s.layout.rings == 1);
  CHECK(s.ue_groups[0].traffic.kind == TrafficKind::Bursty);
  CHECK(s.ue_groups[0].traffic.bursty.mean_interarrival_ms == 10000.0);
}

TEST_CASE("unknown keys are rejected with their path") {
  auto d = minimal();
  d["colour"] = "blue";
  CHECK(error_of(d).find("scenario.colour") != std::string::npos);
  d = minimal();
  d["ue_groups"][0]["traffic"]["bursty"] = {{"mean_interarival_ms", 5000}};
  CHECK(error_of(d).find("scenario.ue_groups[0].traffic.bursty.mean_interarival_ms") != std::string::npos);
  d = minimal();
  d["scheduler"] = {{"clpc", {{"windw", 3}}}};
  CHECK(error_of(d).find("scenario.scheduler.clpc.windw") != std::string::npos);
}

TEST_CASE("type and range errors name the field") {
  auto d = minimal();
  d["duration_ms"] = "long";
  CHECK(error_of(d).find("scenario.duration_ms") != std::string::npos);
  d = minimal();
  d["ue_groups"][0]["count"] = -1;
  CHECK(error_of(d).find("scenario.ue_groups[0].count") != std::string::npos);
  d = minimal();
  d["ue_groups"][0]["traffic"]["kind"] = "video";
  CHECK(error_of(d).find("scenario.ue_groups[0].traffic.kind") != std::string::npos);
  d = minimal();
  d["ue_groups"][0]["ce"] = {{"rl_mpdcch", 3}};
  CHECK_FALSE(error_of(d).empty());
  d = minimal();
  d["layout"] = {{"sectors", 2}};
  CHECK(error_of(d).find("sectors") != std::string::npos);
  d = minimal();
  d["scheduler"] = {{"initial_mcs", 16}};
  CHECK(error_of(d).find("initial_mcs") != std::string::npos);
  d = minimal();
  d["ue_groups"] = json::array();
  CHECK_FALSE(error_of(d).empty());
}

TEST_CASE("resolved JSON round-trips exactly") {
  auto d = minimal();
  d["radio"] = {{"interference", "shared"}, {"legacy_load", 0.4}};
  d["ue_groups"][0]["coupling_loss_db"] = 142.5;
  d["ue_groups"][0]["drx"] = {{"cycle_ms", 640}, {"on_duration_ms", 8}};
  d["ue_groups"][0]["power_control"] = {{"mode", "CLPC"}};
  d["output"] = {{"trace", "full"}};
  const Scenario a = scenario_from_json(d);
  const json resolved = to_json(a);
  const Scenario b = scenario_from_json(resolved);
  CHECK(to_json(b) == resolved);
  CHECK(b.radio.interference == InterferenceMode::Shared);
  CHECK(b.ue_groups[0].coupling_loss_db.value() == 142.5);
  CHECK(b.ue_groups[0].drx->cycle_ms == 640);
  CHECK(b.ue_groups[0].power_control.mode == ue::PowerControlMode::Clpc);
  CHECK(b.output.trace == TraceLevel::Full);
}

TEST_CASE("missing file is a configuration error") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

}
