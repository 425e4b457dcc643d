#pragma once

// Cell bandwidth structure: PRBs, RBGs, narrowband placements, per-TTI
// occupancy and the MPDCCH aggregation-unit pool.

#include <bitset>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catm/common.hpp"
#include "json.hpp"

namespace catm::grid {

inline constexpr int kMaxPrbs = 128;
inline constexpr int kNarrowbandPrbs = 6;
inline constexpr int kMpdcchPoolUnits = 24;

struct PrbRange {
  int first = 0;
  int count = 0;
  int end() const { return first + count; }
  bool intersects(const PrbRange& o) const { return first < o.end() && o.first < end(); }
  bool operator==(const PrbRange&) const = default;
};

struct BandwidthProfile {
  double bandwidth_mhz = 10.0;
  int total_prbs = 50;
  int rbg_size = 3;
  std::vector<PrbRange> rbg_layout;
  /// First PRB of each narrowband, in narrowband index order.
  std::vector<int> narrowband_starts;

  /// RBGs of `rbg_size` partitioning [0, total_prbs); the last one may be short.
  static std::vector<PrbRange> partition_rbgs(int total_prbs, int rbg_size);
  /// Standard narrowband positions: floor(N/6) bands, leftover PRBs split
  /// between the band edges, plus the centre PRB for odd N.
  static std::vector<int> standard_narrowband_starts(int total_prbs);
  /// Profile with standard RBGs and narrowbands.
  static BandwidthProfile standard(double bandwidth_mhz, int total_prbs, int rbg_size);

  void validate() const;
};

/// Named LTE bandwidths keyed by MHz, as shipped in data/narrowband_layout.json.
class NarrowbandLayoutTable {
 public:
  static NarrowbandLayoutTable builtin();
  static NarrowbandLayoutTable from_json(const nlohmann::json& doc);
  static NarrowbandLayoutTable load(const std::string& path);
  nlohmann::json to_json() const;

  const BandwidthProfile& profile(double bandwidth_mhz) const;
  const std::vector<BandwidthProfile>& profiles() const { return profiles_; }

 private:
  std::vector<BandwidthProfile> profiles_;
};

struct NarrowbandPlan {
  int nb_index = 0;
  PrbRange prb_range;
  std::vector<int> blocked_rbgs;
  int wasted_prbs = 0;
};

std::vector<NarrowbandPlan> enumerate_narrowbands(const BandwidthProfile& profile);
/// Minimum waste; ties go to the highest index.
NarrowbandPlan choose_narrowband(const BandwidthProfile& profile);

struct Owner {
  int ue_id = -1;
  int harq_process = -1;
  bool operator==(const Owner&) const = default;
};

enum class ResourceKind { DownlinkPrbs, UplinkPrbs, MpdcchUnits };

/// A booking of one resource over the TTIs [first_tti, first_tti + num_ttis).
struct ResourceRequest {
  ResourceKind kind = ResourceKind::MpdcchUnits;
  Tti first_tti = 0;
  int num_ttis = 1;
  PrbRange prbs;    // PRB kinds
  int units = 0;    // MPDCCH kind
};

enum class Binding { None, Prbs, MpdcchPool, Horizon };

struct Rejection {
  Binding binding = Binding::None;
  Tti tti = 0;
  std::string detail;
};

using ReservationId = std::uint64_t;

struct ReserveResult {
  std::optional<ReservationId> id;
  Rejection rejection;
  explicit operator bool() const { return id.has_value(); }
};

struct GridUsage {
  std::int64_t ttis = 0;
  std::int64_t dl_prb_ttis = 0;
  std::int64_t ul_prb_ttis = 0;
  std::int64_t mpdcch_unit_ttis = 0;
  std::int64_t max_mpdcch_units_in_tti = 0;
};

/// Occupancy of one cell's grid over a sliding window of future TTIs.
class ResourceGrid {
 public:
  ResourceGrid(int total_prbs, PrbRange narrowband, int mpdcch_capacity = kMpdcchPoolUnits,
               int horizon_ttis = 4096);

  int total_prbs() const { return total_prbs_; }
  const PrbRange& narrowband() const { return narrowband_; }
  int mpdcch_capacity() const { return mpdcch_capacity_; }
  Tti now() const { return now_; }
  Tti horizon_end() const { return now_ + horizon_; }

  /// Books every request or none of them. Zero-sized requests throw InputError.
  ReserveResult reserve(std::span<const ResourceRequest> requests, Owner owner);
  ReserveResult reserve(const ResourceRequest& request, Owner owner) { return reserve({&request, 1}, owner); }
  /// Undo a reservation (only the TTIs not yet retired are restored).
  void release(ReservationId id);

  /// First narrowband-relative placement of `count` PRBs free over the TTI range, if any.
  std::optional<PrbRange> find_free_prbs(ResourceKind kind, Tti first_tti, int num_ttis, int count) const;

  int mpdcch_free(Tti tti) const;
  int prbs_used(ResourceKind kind, Tti tti) const;
  bool prb_used(ResourceKind kind, Tti tti, int prb) const;

  /// Retire TTIs before `tti` into the usage counters.
  void advance_to(Tti tti);
  const GridUsage& usage() const { return usage_; }
  std::size_t active_reservations() const { return reservations_.size(); }

  /// Throws InvariantBreach if any slot exceeds capacity or disagrees with the reservation list.
  void audit() const;

 private:
  struct Slot {
    std::bitset<kMaxPrbs> dl;
    std::bitset<kMaxPrbs> ul;
    int mpdcch_used = 0;
  };
  struct Booking {
    Owner owner;
    std::vector<ResourceRequest> requests;
  };

  Slot& slot(Tti tti) { return slots_[static_cast<std::size_t>(tti % horizon_)]; }
  const Slot& slot(Tti tti) const { return slots_[static_cast<std::size_t>(tti % horizon_)]; }
  bool in_window(Tti tti) const { return tti >= now_ && tti < now_ + horizon_; }
  std::optional<Rejection> check(const ResourceRequest& r) const;
  void apply(const ResourceRequest& r, bool book);

  int total_prbs_;
  PrbRange narrowband_;
  int mpdcch_capacity_;
  int horizon_;
  Tti now_ = 0;
  std::vector<Slot> slots_;
  std::map<ReservationId, Booking> reservations_;
  ReservationId next_id_ = 1;
  GridUsage usage_;
};

}  // namespace catm::grid
