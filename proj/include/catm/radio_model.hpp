#pragma once

// Abstracted physical layer: geometry to coupling loss, coupling loss to SINR,
// SINR to block error probability, and the maximum-coupling-loss search.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catm/common.hpp"
#include "catm/tbs_table.hpp"
#include "json.hpp"

namespace catm::radio {

inline constexpr double kThermalNoiseDbmPerHz = -174.0;
inline constexpr double kPrbBandwidthHz = 180e3;
inline constexpr double kEnbNoiseFigureDb = 5.0;
inline constexpr double kUeNoiseFigureDb = 9.0;
inline constexpr double kMinDistanceM = 35.0;
/// Upper bound on any Cat-M UE transmit power setting (power class 3).
inline constexpr double kCatMPowerCeilingDbm = 23.0;

struct AntennaPattern {
  double max_gain_db = 17.0;
  double vertical_beamwidth_deg = 10.0;
  double sla_db = 20.0;
  double downtilt_deg = 15.0;
  double horizontal_beamwidth_deg = 65.0;
  double horizontal_am_db = 25.0;
  /// Drop the horizontal term, e.g. for single-link studies.
  bool omni_horizontal = false;

  void validate() const;
};

/// Macro path loss 128.1 + 37.6 log10(d_km); distance clamped below `min_distance_m`.
double path_loss_db(double distance_m, double carrier_ghz = 2.0, double min_distance_m = kMinDistanceM);

/// Sector antenna gain. `azimuth_deg` is measured from the sector boresight,
/// `elevation_deg` is the downward angle from the horizon to the UE.
double antenna_gain_db(double azimuth_deg, double elevation_deg, const AntennaPattern& pattern);

struct LinkState {
  double distance_m = 0.0;
  double path_loss_db = 0.0;
  double shadow_db = 0.0;
  double body_loss_db = 1.0;
  double antenna_gain_db = 0.0;
  double ue_antenna_gain_db = -3.0;
  double coupling_loss_db = 0.0;
  double sinr_db = 0.0;
  double interference_dbm = 0.0;
};

/// Builds a link and fills coupling_loss_db from its parts.
LinkState make_link(double distance_m, double path_loss, double shadow, double body_loss, double enb_gain,
                    double ue_gain);

/// Thermal noise plus receiver noise figure over `n_prbs` PRBs.
double noise_dbm(int n_prbs, double noise_figure_db);

/// SINR after coherently combining `total_repetitions` copies (any real >= 1).
double combined_sinr_db(double sinr_per_tx_db, double total_repetitions, double penalty_db_per_doubling);

/// SINR after `repetitions` on the ladder. Throws ConfigError off-ladder.
double effective_sinr_db(double sinr_per_tx_db, int repetitions, double penalty_db_per_doubling = 0.5);

struct McsCurve {
  double threshold_db;  // 50% BLER point at the reference TBS
  double slope_db;      // logistic scale
  bool operator==(const McsCurve&) const = default;
};

/// Per-MCS logistic waterfall with a TBS-size correction.
class BlerModel {
 public:
  static BlerModel builtin();
  static BlerModel from_json(const nlohmann::json& doc);
  static BlerModel load(const std::string& path);
  nlohmann::json to_json() const;

  int num_mcs() const { return static_cast<int>(curves_.size()); }
  const McsCurve& curve(int mcs) const;
  double tbs_ref_bits() const { return tbs_ref_bits_; }
  double tbs_sensitivity_db_per_doubling() const { return tbs_sensitivity_; }
  double combining_penalty_db_per_doubling() const { return combining_penalty_; }
  const std::string& version() const { return version_; }

  /// SINR shift applied to the threshold for a block of `tbs_bits`.
  double tbs_shift_db(double tbs_bits) const;

  /// Block error probability in (0, 1). Throws ConfigError for unknown MCS and
  /// InputError for tbs_bits <= 0.
  double bler(double eff_sinr_db, int mcs, double tbs_bits) const;

  /// Vectorised bler over parallel arrays; all spans must have equal length.
  void bler_batch(std::span<const double> eff_sinr_db, std::span<const int> mcs,
                  std::span<const double> tbs_bits, std::span<double> out) const;

  bool operator==(const BlerModel&) const = default;

 private:
  std::string version_;
  std::vector<McsCurve> curves_;
  double tbs_ref_bits_ = 328.0;
  double tbs_sensitivity_ = 0.15;
  double combining_penalty_ = 0.5;

  void validate() const;
};

/// One coverage question: at what coupling loss does residual loss reach 2%?
struct CoverageQuery {
  Direction direction = Direction::Uplink;
  int rl_mpdcch = 4;
  int rl_data = 8;
  int rl_ack = 8;
  int tbs_bits = 328;
  int mcs = 3;
  double tx_power_dbm = 20.0;
  int max_attempts = 4;
  double interference_margin_db = 0.0;
  /// Residual-loss target.
  double target = 0.02;
  /// End-to-end delay budget; HARQ attempts that cannot finish in time are not made.
  std::optional<double> delay_budget_ms;
  /// Periodic block arrivals sharing one HARQ process (queueing included); isolated block when empty.
  std::optional<double> tb_interarrival_ms;
  /// Time the oldest payload waited before the block was formed (aggregation).
  double formation_wait_ms = 0.0;
};

struct CoverageResult {
  bool feasible = false;
  double mcl_db = 0.0;
  int n_prbs = 0;
  std::string reason;
};

/// Fraction of blocks lost (HARQ exhausted or delay budget exceeded) at one coupling loss.
double residual_loss(const CoverageQuery& q, double coupling_loss_db, const BlerModel& model,
                     const TbsTable& tbs);

/// Largest coupling loss whose residual loss stays within q.target, by bisection.
CoverageResult mcl_search(const CoverageQuery& q, const BlerModel& model, const TbsTable& tbs);

}  // namespace catm::radio
