#pragma once

// TTI-stepped multi-cell simulator. Per TTI: traffic arrivals, UE RRC/DRX/RACH
// and SR/CQI, per-cell scheduling, transmission outcomes against the previous
// TTI's interference snapshot, HARQ feedback, KPI accumulation.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "catm/kpi.hpp"
#include "catm/layout.hpp"
#include "catm/scenario.hpp"

namespace catm::sim {

/// One transmitter active in a TTI, as seen by the interference computation.
struct ActiveTx {
  int cell = 0;  // DL: transmitting cell; UL: serving cell of the UE
  int ue = -1;   // UL only
  Direction direction = Direction::Downlink;
  grid::PrbRange prbs;
  double power_per_prb_dbm = 0.0;
};

/// Co-channel interference per PRB (mW) received over `prbs` by the DL receiver of `ue`
/// (DL) or by the serving cell of `ue` (UL), from transmitters of other cells in `snapshot`.
/// Partial PRB overlaps are weighted by the overlapping share.
double co_channel_interference_mw(const std::vector<ActiveTx>& snapshot, const Layout& layout, int ue,
                                  Direction dir, grid::PrbRange prbs);

/// Per-PRB legacy interference floor (mW) for the configured interference mode.
double legacy_interference_mw(const Scenario& sc, const Layout& layout, int ue, Direction dir,
                              double enb_power_per_prb_dbm);

/// CE tier for a coupling loss when a group does not pin one: channel repetitions and
/// the data repetition used before any link estimate exists.
struct CeTier {
  ue::CeConfig ce;
  int fallback_rl = 1;
};
CeTier ce_tier(double coupling_loss_db);

struct SimCounters {
  std::int64_t grants = 0;
  std::int64_t blocked_mpdcch = 0;
  std::int64_t blocked_prbs = 0;
  std::int64_t blocked_half_duplex = 0;
  std::int64_t audits = 0;
};

class Simulator {
 public:
  /// Validates the scenario (ConfigError with a field path) and builds the layout.
  explicit Simulator(const Scenario& sc);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Advances one TTI.
  void step();
  /// Steps until `duration_ms` TTIs have run.
  void run();
  Tti now() const;

  const Scenario& scenario() const;
  const Layout& layout() const;
  /// Report at the current instant; in-flight packets are counted as such.
  KpiReport report() const;
  /// Per-TTI trace CSV (empty when tracing is off).
  const std::string& trace_csv() const;
  const SimCounters& counters() const;
  /// Per-PRB SINR (dB) the last data reception of `ue` in `dir` saw; NaN if none yet.
  double last_sinr_db(int ue, Direction dir) const;
  /// Mean per-PRB SINR (dB, linear average) over every data TTI so far; NaN if none.
  double mean_sinr_db() const;

  /// Audits grids, calendars and packet conservation; throws InvariantBreach.
  void audit() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct RunOutput {
  KpiReport report;
  std::string trace_csv;
};

RunOutput run_scenario(const Scenario& sc);

/// Runs every scenario on up to `threads` workers; results come back in input order.
std::vector<RunOutput> run_batch(const std::vector<Scenario>& scenarios, int threads);

/// Runs `sc` once per seed on up to `threads` workers; results come back in seed order.
std::vector<RunOutput> run_seed_sweep(const Scenario& sc, const std::vector<std::uint64_t>& seeds, int threads);

}  // namespace catm::sim
