#include "catm/radio_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>

#include "catm/harq_timing.hpp"
#include "catm/kernels.hpp"

namespace catm::radio {

void AntennaPattern::validate() const {
  const std::array<double, 6> v{max_gain_db, vertical_beamwidth_deg, sla_db, downtilt_deg, horizontal_beamwidth_deg,
                                horizontal_am_db};
  for (double x : v)
    if (!std::isfinite(x)) throw ConfigError("antenna pattern: non-finite parameter");
  if (vertical_beamwidth_deg <= 0 || horizontal_beamwidth_deg <= 0)
    throw ConfigError("antenna pattern: beamwidths must be positive");
  if (sla_db < 0 || horizontal_am_db < 0) throw ConfigError("antenna pattern: attenuation floors must be >= 0");
}

double path_loss_db(double distance_m, double carrier_ghz, double min_distance_m) {
  if (!std::isfinite(distance_m) || distance_m <= 0.0)
    throw InputError("path_loss: distance must be finite and positive");
  if (!std::isfinite(carrier_ghz) || carrier_ghz <= 0.0) throw InputError("path_loss: carrier must be positive");
  const double d = std::max(distance_m, min_distance_m);
  return 128.1 + 37.6 * std::log10(d / 1000.0);
}

namespace {
double wrap_deg(double a) {
  a = std::fmod(a + 180.0, 360.0);
  if (a < 0) a += 360.0;
  return a - 180.0;
}
}  // namespace

double antenna_gain_db(double azimuth_deg, double elevation_deg, const AntennaPattern& p) {
  const double dv = (wrap_deg(elevation_deg) - p.downtilt_deg) / p.vertical_beamwidth_deg;
  const double vertical = std::min(12.0 * dv * dv, p.sla_db);
  double horizontal = 0.0;
  if (!p.omni_horizontal) {
    const double dh = wrap_deg(azimuth_deg) / p.horizontal_beamwidth_deg;
    horizontal = std::min(12.0 * dh * dh, p.horizontal_am_db);
  }
  return p.max_gain_db - (vertical + horizontal);
}

LinkState make_link(double distance_m, double path_loss, double shadow, double body_loss, double enb_gain,
                    double ue_gain) {
  LinkState l;
  l.distance_m = distance_m;
  l.path_loss_db = path_loss;
  l.shadow_db = shadow;
  l.body_loss_db = body_loss;
  l.antenna_gain_db = enb_gain;
  l.ue_antenna_gain_db = ue_gain;
  l.coupling_loss_db = path_loss + shadow + body_loss - enb_gain - ue_gain;
  return l;
}

double noise_dbm(int n_prbs, double noise_figure_db) {
  if (n_prbs < 1) throw InputError("noise_dbm: n_prbs must be >= 1");
  return kThermalNoiseDbmPerHz + 10.0 * std::log10(n_prbs * kPrbBandwidthHz) + noise_figure_db;
}

double combined_sinr_db(double sinr_per_tx_db, double total_repetitions, double penalty_db_per_doubling) {
  if (!(total_repetitions >= 1.0)) throw InputError("combined_sinr: repetitions must be >= 1");
  return sinr_per_tx_db + 10.0 * std::log10(total_repetitions) -
         penalty_db_per_doubling * std::log2(total_repetitions);
}

double effective_sinr_db(double sinr_per_tx_db, int repetitions, double penalty_db_per_doubling) {
  require_repetition(repetitions, "effective_sinr");
  if (penalty_db_per_doubling < 0.0 || penalty_db_per_doubling >= 10.0 * std::log10(2.0))
    throw ConfigError("combining penalty must lie in [0, 3.01) dB per doubling");
  return combined_sinr_db(sinr_per_tx_db, repetitions, penalty_db_per_doubling);
}

// ---------------------------------------------------------------------------
// BLER model

BlerModel BlerModel::builtin() {
  BlerModel m;
  m.version_ = "catm-bler-1";
  m.curves_ = {
      {-8.5, 1.5}, {-7.5, 1.5}, {-6.5, 1.5}, {-5.5, 1.5}, {-4.6, 1.5}, {-3.7, 1.5}, {-2.7, 1.5}, {-1.7, 1.5}, {-0.8, 1.5}, {0.1, 1.5}, {1.0, 1.5}, {1.6, 1.5}, {2.5, 1.5}, {3.4, 1.5}, {4.4, 1.5}, {5.5, 1.5},
  };
  m.tbs_ref_bits_ = 328.0;
  m.tbs_sensitivity_ = 0.15;
  m.combining_penalty_ = 0.5;
  m.validate();
  return m;
}

void BlerModel::validate() const {
  if (curves_.empty()) throw ConfigError("bler model: no MCS curves");
  for (std::size_t i = 0; i < curves_.size(); ++i) {
    if (!std::isfinite(curves_[i].threshold_db) || !(curves_[i].slope_db > 0.0))
      throw ConfigError("bler model: MCS " + std::to_string(i) + " needs finite threshold and positive slope");
    if (i > 0 && curves_[i].threshold_db < curves_[i - 1].threshold_db)
      throw ConfigError("bler model: thresholds must not decrease with MCS (MCS " + std::to_string(i) + ")");
  }
  if (!(tbs_ref_bits_ > 0.0)) throw ConfigError("bler model: tbs_ref_bits must be positive");
  if (tbs_sensitivity_ < 0.0) throw ConfigError("bler model: tbs sensitivity must be >= 0");
  if (combining_penalty_ < 0.0 || combining_penalty_ >= 10.0 * std::log10(2.0))
    throw ConfigError("bler model: combining penalty must lie in [0, 3.01) dB per doubling");
}

BlerModel BlerModel::from_json(const nlohmann::json& doc) {
  static const std::array<const char*, 6> kKeys{"version", "tbs_ref_bits", "tbs_sensitivity_db_per_doubling",
                                                "combining_penalty_db_per_doubling", "mcs", "comment"};
  for (const auto& [key, _] : doc.items())
    if (std::find_if(kKeys.begin(), kKeys.end(), [&](const char* k) { return key == k; }) == kKeys.end())
      throw ConfigError("bler model: unknown key '" + key + "'");
  BlerModel m;
  m.version_ = doc.at("version").get<std::string>();
  m.tbs_ref_bits_ = doc.at("tbs_ref_bits").get<double>();
  m.tbs_sensitivity_ = doc.at("tbs_sensitivity_db_per_doubling").get<double>();
  m.combining_penalty_ = doc.at("combining_penalty_db_per_doubling").get<double>();
  const auto& rows = doc.at("mcs");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows.at(i);
    if (r.at("index").get<std::size_t>() != i) throw ConfigError("bler model: MCS rows must be listed 0,1,2,...");
    m.curves_.push_back({r.at("threshold_db").get<double>(), r.at("slope_db").get<double>()});
  }
  m.validate();
  return m;
}

BlerModel BlerModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open bler table '" + path + "'");
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bler table '" + path + "': " + e.what());
  }
}

nlohmann::json BlerModel::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < curves_.size(); ++i)
    rows.push_back({{"index", i}, {"threshold_db", curves_[i].threshold_db}, {"slope_db", curves_[i].slope_db}});
  return {{"version", version_},
          {"tbs_ref_bits", tbs_ref_bits_},
          {"tbs_sensitivity_db_per_doubling", tbs_sensitivity_},
          {"combining_penalty_db_per_doubling", combining_penalty_},
          {"mcs", rows}};
}

const McsCurve& BlerModel::curve(int mcs) const {
  if (mcs < 0 || mcs >= num_mcs()) throw ConfigError("unknown MCS index " + std::to_string(mcs));
  return curves_[static_cast<std::size_t>(mcs)];
}

double BlerModel::tbs_shift_db(double tbs_bits) const {
  return tbs_sensitivity_ * std::log2(tbs_bits / tbs_ref_bits_);
}

double BlerModel::bler(double eff_sinr_db, int mcs, double tbs_bits) const {
  const McsCurve& c = curve(mcs);
  if (!(tbs_bits > 0.0)) throw InputError("bler: tbs_bits must be positive");
  const double thr = c.threshold_db + tbs_shift_db(tbs_bits);
  double out = 0.0;
  kernels::scalar().logistic_waterfall({&eff_sinr_db, 1}, {&thr, 1}, {&c.slope_db, 1}, {&out, 1});
  return out;
}

void BlerModel::bler_batch(std::span<const double> eff_sinr_db, std::span<const int> mcs,
                           std::span<const double> tbs_bits, std::span<double> out) const {
  const std::size_t n = eff_sinr_db.size();
  if (mcs.size() != n || tbs_bits.size() != n || out.size() != n)
    throw InputError("bler_batch: span lengths differ");
  std::vector<double> thr(n), slope(n);
  for (std::size_t i = 0; i < n; ++i) {
    const McsCurve& c = curve(mcs[i]);
    if (!(tbs_bits[i] > 0.0)) throw InputError("bler: tbs_bits must be positive");
    thr[i] = c.threshold_db + tbs_shift_db(tbs_bits[i]);
    slope[i] = c.slope_db;
  }
  kernels::logistic_waterfall(eff_sinr_db, thr, slope, out);
}

// ---------------------------------------------------------------------------
// Coverage

namespace {

constexpr int kQueueBlocks = 4000;
constexpr std::uint64_t kQueueSeed = 0x6d636c5f73656564ULL;

const std::vector<double>& queue_uniforms() {
  static const std::vector<double> u = [] {
    std::mt19937_64 rng(kQueueSeed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(kQueueBlocks);
    for (double& x : v) x = dist(rng);
    return v;
  }();
  return u;
}

struct PreparedQuery {
  int n_prbs = 0;
  double noise_figure_db = 0.0;
  double cycle_ms = 0.0;
  double data_end_ms = 0.0;
};

PreparedQuery prepare(const CoverageQuery& q, const BlerModel& model, const TbsTable& tbs) {
  require_repetition(q.rl_mpdcch, "mcl_search rl_mpdcch");
  require_repetition(q.rl_data, "mcl_search rl_data");
  require_repetition(q.rl_ack, "mcl_search rl_ack");
  if (q.tbs_bits <= 0) throw InputError("mcl_search: tbs_bits must be positive");
  if (q.max_attempts < 1) throw InputError("mcl_search: max_attempts must be >= 1");
  if (!(q.target > 0.0 && q.target < 1.0)) throw InputError("mcl_search: target must lie in (0,1)");
  if (q.direction == Direction::Uplink && q.tx_power_dbm > kCatMPowerCeilingDbm)
    throw InputError("mcl_search: UE transmit power above the Cat-M maximum");
  if (q.delay_budget_ms && !(*q.delay_budget_ms > 0.0)) throw InputError("mcl_search: delay budget must be positive");
  if (q.tb_interarrival_ms && !(*q.tb_interarrival_ms > 0.0))
    throw InputError("mcl_search: block inter-arrival must be positive");
  (void)model.curve(q.mcs);
  PreparedQuery p;
  p.n_prbs = tbs.prbs_for(q.mcs, q.tbs_bits);
  p.noise_figure_db = q.direction == Direction::Uplink ? kEnbNoiseFigureDb : kUeNoiseFigureDb;
  p.cycle_ms = harq_cycle_ms(q.direction, q.rl_mpdcch, q.rl_data, q.rl_ack);
  p.data_end_ms = data_end_offset(q.direction, q.rl_mpdcch, q.rl_data);
  return p;
}

// Cumulative failure probability after 1..max_attempts chase-combined attempts.
std::vector<double> cumulative_failure(const CoverageQuery& q, const PreparedQuery& p, double cl,
                                       const BlerModel& model) {
  const double sinr = q.tx_power_dbm - cl - noise_dbm(p.n_prbs, p.noise_figure_db) - q.interference_margin_db;
  std::vector<double> f(static_cast<std::size_t>(q.max_attempts));
  for (int a = 1; a <= q.max_attempts; ++a) {
    const double eff = combined_sinr_db(sinr, double(a) * q.rl_data, model.combining_penalty_db_per_doubling());
    f[a - 1] = model.bler(eff, q.mcs, q.tbs_bits);
  }
  return f;
}

int attempts_fitting(const CoverageQuery& q, const PreparedQuery& p, double waited_ms) {
  if (!q.delay_budget_ms) return q.max_attempts;
  const double slack = *q.delay_budget_ms - q.formation_wait_ms - waited_ms - p.data_end_ms;
  if (slack < 0.0) return 0;
  return std::min(q.max_attempts, 1 + static_cast<int>(std::floor(slack / p.cycle_ms)));
}

double residual_prepared(const CoverageQuery& q, const PreparedQuery& p, double cl, const BlerModel& model) {
  const std::vector<double> f = cumulative_failure(q, p, cl, model);
  if (!q.tb_interarrival_ms) {
    const int allowed = attempts_fitting(q, p, 0.0);
    return allowed == 0 ? 1.0 : f[allowed - 1];
  }
  // One HARQ process serving periodic blocks. Attempts needed by each block come
  // from one shared uniform per block, so the loss is monotone in coupling loss.
  const auto& u = queue_uniforms();
  const double period = *q.tb_interarrival_ms;
  double server_free = 0.0;
  int lost = 0;
  for (int j = 0; j < kQueueBlocks; ++j) {
    const double arrival = j * period;
    const double start = std::max(arrival, server_free);
    const int allowed = attempts_fitting(q, p, start - arrival);
    int needed = q.max_attempts + 1;
    for (int a = 1; a <= q.max_attempts; ++a)
      if (u[j] >= f[a - 1]) {
        needed = a;
        break;
      }
    if (needed <= allowed) {
      server_free = start + needed * p.cycle_ms;
    } else {
      ++lost;
      server_free = start + allowed * p.cycle_ms;
    }
  }
  return static_cast<double>(lost) / kQueueBlocks;
}

}  // namespace

double residual_loss(const CoverageQuery& q, double coupling_loss_db, const BlerModel& model, const TbsTable& tbs) {
  const PreparedQuery p = prepare(q, model, tbs);
  if (p.n_prbs == 0) return 1.0;
  return residual_prepared(q, p, coupling_loss_db, model);
}

CoverageResult mcl_search(const CoverageQuery& q, const BlerModel& model, const TbsTable& tbs) {
  const PreparedQuery p = prepare(q, model, tbs);
  CoverageResult r;
  r.n_prbs = p.n_prbs;
  if (p.n_prbs == 0) {
    r.reason = "tbs does not fit 6 PRBs at this MCS";
    return r;
  }
  double lo = 0.0, hi = 300.0;
  if (residual_prepared(q, p, lo, model) > q.target) {
    r.reason = "residual loss above target even at 0 dB coupling loss";
    return r;
  }
  r.feasible = true;
  if (residual_prepared(q, p, hi, model) <= q.target) {
    r.mcl_db = hi;
    return r;
  }
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (residual_prepared(q, p, mid, model) <= q.target ? lo : hi) = mid;
  }
  r.mcl_db = lo;
  return r;
}

}  // namespace catm::radio
