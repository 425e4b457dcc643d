#include <cmath>
#include <vector>

#include "catm/radio_model.hpp"
#include "catm/ue_protocol.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace catm;
using namespace catm::radio;

TEST_SUITE("radio") {

TEST_CASE("macro path loss at reference distances") {
  CHECK(path_loss_db(500.0) == doctest::Approx(116.78).epsilon(1e-4));
  CHECK(path_loss_db(250.0) == doctest::Approx(105.46).epsilon(1e-4));
  for (double d : {1.0, 35.0, 100.0, 433.0, 1732.0}) CHECK(path_loss_db(d) == doctest::Approx(oracle::path_loss_db(d)));
  // Clamped below the minimum distance.
  CHECK(path_loss_db(5.0) == doctest::Approx(path_loss_db(35.0)));
  CHECK_THROWS_AS(path_loss_db(0.0), InputError);
  CHECK_THROWS_AS(path_loss_db(NAN), InputError);
}

TEST_CASE("path loss grows monotonically with distance") {
  double prev = path_loss_db(35.0);
  for (double d = 40.0; d < 5000.0; d *= 1.1) {
    const double pl = path_loss_db(d);
    CHECK(pl > prev);
    prev = pl;
  }
}

TEST_CASE("sector antenna gain") {
  AntennaPattern p;
  // On boresight at the downtilt angle: full gain.
  CHECK(antenna_gain_db(0.0, 15.0, p) == doctest::Approx(17.0));
  // Half-power points.
  CHECK(antenna_gain_db(32.5, 15.0, p) == doctest::Approx(14.0));
  CHECK(antenna_gain_db(0.0, 20.0, p) == doctest::Approx(14.0));
  // Horizontal and vertical attenuations each saturate, and their sum is not capped further.
  CHECK(antenna_gain_db(180.0, 15.0, p) == doctest::Approx(17.0 - 25.0));
  CHECK(antenna_gain_db(180.0, 90.0, p) == doctest::Approx(17.0 - 25.0 - 20.0));
  // Symmetric in azimuth and wrapped.
  CHECK(antenna_gain_db(-40.0, 10.0, p) == doctest::Approx(antenna_gain_db(40.0, 10.0, p)));
  CHECK(antenna_gain_db(400.0, 10.0, p) == doctest::Approx(antenna_gain_db(40.0, 10.0, p)));
  p.omni_horizontal = true;
  CHECK(antenna_gain_db(120.0, 15.0, p) == doctest::Approx(17.0));
}

TEST_CASE("coupling loss adds its parts") {
  const LinkState l = make_link(500.0, 116.78, 4.0, 1.0, 17.0, -3.0);
  CHECK(l.coupling_loss_db == doctest::Approx(116.78 + 4.0 + 1.0 - 17.0 + 3.0));
}

TEST_CASE("thermal noise per PRB") {
  CHECK(noise_dbm(1, 0.0) == doctest::Approx(-174.0 + 10.0 * std::log10(180e3)));
  CHECK(noise_dbm(6, 5.0) - noise_dbm(1, 5.0) == doctest::Approx(10.0 * std::log10(6.0)));
  CHECK_THROWS_AS(noise_dbm(0, 5.0), InputError);
}

TEST_CASE("repetition combining gain") {
  CHECK(effective_sinr_db(-5.0, 1) == doctest::Approx(-5.0));
  // 3.01 dB per doubling minus the penalty.
  CHECK(effective_sinr_db(-5.0, 2, 0.5) == doctest::Approx(-5.0 + 10 * std::log10(2.0) - 0.5));
  CHECK(effective_sinr_db(0.0, 32, 0.5) == doctest::Approx(10 * std::log10(32.0) - 2.5));
  CHECK_THROWS_AS(effective_sinr_db(0.0, 3), ConfigError);
  CHECK_THROWS_AS(effective_sinr_db(0.0, 512), ConfigError);
  double prev = effective_sinr_db(0.0, 1);
  for (int r = 2; r <= 256; r *= 2) {
    const double s = effective_sinr_db(0.0, r);
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("UE transmit power with fractional path-loss compensation") {
  ue::PowerControlState pc;
  pc.p0_dbm = -100.0;
  pc.alpha = 1.0;
  pc.p_max_dbm = 20.0;
  CHECK(ue::tx_power(pc, 80.0, 1) == doctest::Approx(-20.0));
  CHECK(ue::tx_power(pc, 80.0, 4) == doctest::Approx(-13.98).epsilon(1e-3));
  CHECK(ue::tx_power(pc, 140.0, 6) == doctest::Approx(20.0));
  for (double cl : {60.0, 100.0, 117.0, 125.0, 150.0})
    for (int n = 1; n <= 6; ++n) CHECK(ue::tx_power(pc, cl, n) == doctest::Approx(oracle::tx_power_dbm(20.0, -100.0, 1.0, cl, n)));
  pc.alpha = 0.8;
  CHECK(ue::tx_power(pc, 100.0, 1) == doctest::Approx(oracle::tx_power_dbm(20.0, -100.0, 0.8, 100.0, 1)));
}

TEST_CASE("BLER falls with SINR and rises with MCS and block size") {
  const BlerModel m = BlerModel::builtin();
  for (int mcs = 0; mcs < m.num_mcs(); ++mcs) {
    double prev = 1.0;
    for (double s = -25.0; s <= 30.0; s += 0.5) {
      const double b = m.bler(s, mcs, 328);
      CHECK(b > 0.0);
      CHECK(b < 1.0);
      CHECK(b <= prev);
      prev = b;
    }
  }
  for (int mcs = 1; mcs < m.num_mcs(); ++mcs) CHECK(m.bler(0.0, mcs, 328) >= m.bler(0.0, mcs - 1, 328));
  CHECK(m.bler(0.0, 5, 1000) > m.bler(0.0, 5, 100));
  CHECK_THROWS_AS(m.bler(0.0, 99, 328), ConfigError);
  CHECK_THROWS_AS(m.bler(0.0, 3, 0), InputError);
}

TEST_CASE("batched BLER equals the per-call value") {
  const BlerModel m = BlerModel::builtin();
  std::vector<double> s, tb;
  std::vector<int> mcs;
  for (int i = 0; i < 40; ++i) {
    s.push_back(-12.0 + 0.7 * i);
    mcs.push_back(i % m.num_mcs());
    tb.push_back(56.0 + 23.0 * i);
  }
  std::vector<double> out(s.size());
  m.bler_batch(s, mcs, tb, out);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(out[i] == doctest::Approx(m.bler(s[i], mcs[i], tb[i])).epsilon(1e-12));
}

TEST_CASE("BLER table JSON round trip and validation") {
  const BlerModel m = BlerModel::builtin();
  CHECK(BlerModel::from_json(m.to_json()) == m);
  auto doc = m.to_json();
  doc["mcs"][3]["threshold_db"] = -100.0;  // breaks monotone thresholds
  CHECK_THROWS_AS(BlerModel::from_json(doc), ConfigError);
  auto extra = m.to_json();
  extra["unexpected"] = 1;
  CHECK_THROWS_AS(BlerModel::from_json(extra), ConfigError);
}

TEST_CASE("residual loss decreases with margin and MCL rises with repetitions") {
  const BlerModel m = BlerModel::builtin();
  const TbsTable t = TbsTable::builtin();
  CoverageQuery q;
  q.tbs_bits = 328;
  q.mcs = 3;
  double prev = 0.0;
  for (double cl = 120.0; cl <= 160.0; cl += 2.0) {
    const double r = residual_loss(q, cl, m, t);
    CHECK(r >= prev - 1e-12);
    prev = r;
  }
  double mcl_prev = 0.0;
  for (int rl : {1, 2, 4, 8, 16, 32}) {
    q.rl_data = rl;
    const CoverageResult c = mcl_search(q, m, t);
    REQUIRE(c.feasible);
    CHECK(c.mcl_db > mcl_prev);
    CHECK(residual_loss(q, c.mcl_db - 0.05, m, t) <= q.target + 1e-9);
    mcl_prev = c.mcl_db;
  }
}

}
