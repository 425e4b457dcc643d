#include "catm/resource_grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace catm::grid {

std::vector<PrbRange> BandwidthProfile::partition_rbgs(int total_prbs, int rbg_size) {
  if (total_prbs <= 0 || rbg_size <= 0) throw ConfigError("bandwidth profile: PRB and RBG sizes must be positive");
  std::vector<PrbRange> out;
  for (int p = 0; p < total_prbs; p += rbg_size) out.push_back({p, std::min(rbg_size, total_prbs - p)});
  return out;
}

std::vector<int> BandwidthProfile::standard_narrowband_starts(int total_prbs) {
  const int count = total_prbs / kNarrowbandPrbs;
  const int edge = (total_prbs % kNarrowbandPrbs) / 2;
  std::vector<int> starts;
  for (int i = 0; i < count; ++i) {
    int s = edge + kNarrowbandPrbs * i;
    if (total_prbs % 2 == 1 && i >= count / 2) s += 1;
    starts.push_back(s);
  }
  return starts;
}

BandwidthProfile BandwidthProfile::standard(double bandwidth_mhz, int total_prbs, int rbg_size) {
  BandwidthProfile p;
  p.bandwidth_mhz = bandwidth_mhz;
  p.total_prbs = total_prbs;
  p.rbg_size = rbg_size;
  p.rbg_layout = partition_rbgs(total_prbs, rbg_size);
  p.narrowband_starts = standard_narrowband_starts(total_prbs);
  return p;
}

void BandwidthProfile::validate() const {
  if (total_prbs < kNarrowbandPrbs)
    throw ConfigError("bandwidth profile: " + std::to_string(total_prbs) + " PRBs cannot hold a 6-PRB narrowband");
  if (total_prbs > kMaxPrbs) throw ConfigError("bandwidth profile: too many PRBs");
  int next = 0;
  for (const PrbRange& r : rbg_layout) {
    if (r.first != next || r.count <= 0) throw ConfigError("bandwidth profile: RBGs must partition the PRBs in order");
    next = r.end();
  }
  if (next != total_prbs) throw ConfigError("bandwidth profile: RBGs do not cover all PRBs");
  for (std::size_t i = 0; i < narrowband_starts.size(); ++i) {
    const int s = narrowband_starts[i];
    if (s < 0 || s + kNarrowbandPrbs > total_prbs) throw ConfigError("bandwidth profile: narrowband outside carrier");
    if (i > 0 && s < narrowband_starts[i - 1] + kNarrowbandPrbs)
      throw ConfigError("bandwidth profile: narrowbands overlap or are out of order");
  }
}

// ---------------------------------------------------------------------------

NarrowbandLayoutTable NarrowbandLayoutTable::builtin() {
  NarrowbandLayoutTable t;
  t.profiles_ = {
      BandwidthProfile::standard(1.4, 6, 1),  BandwidthProfile::standard(3, 15, 2),
      BandwidthProfile::standard(5, 25, 2),   BandwidthProfile::standard(10, 50, 3),
      BandwidthProfile::standard(15, 75, 4),  BandwidthProfile::standard(20, 100, 4),
  };
  return t;
}

NarrowbandLayoutTable NarrowbandLayoutTable::from_json(const nlohmann::json& doc) {
  for (const auto& [key, _] : doc.items())
    if (key != "version" && key != "bandwidths" && key != "comment")
      throw ConfigError("narrowband layout: unknown key '" + key + "'");
  NarrowbandLayoutTable t;
  for (const auto& b : doc.at("bandwidths")) {
    for (const auto& [key, _] : b.items())
      if (key != "bandwidth_mhz" && key != "total_prbs" && key != "rbg_size" && key != "narrowband_starts")
        throw ConfigError("narrowband layout: unknown key '" + key + "'");
    BandwidthProfile p;
    p.bandwidth_mhz = b.at("bandwidth_mhz").get<double>();
    p.total_prbs = b.at("total_prbs").get<int>();
    p.rbg_size = b.at("rbg_size").get<int>();
    p.rbg_layout = BandwidthProfile::partition_rbgs(p.total_prbs, p.rbg_size);
    p.narrowband_starts = b.at("narrowband_starts").get<std::vector<int>>();
    p.validate();
    t.profiles_.push_back(std::move(p));
  }
  return t;
}

NarrowbandLayoutTable NarrowbandLayoutTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open narrowband layout '" + path + "'");
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("narrowband layout '" + path + "': " + e.what());
  }
}

nlohmann::json NarrowbandLayoutTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : profiles_)
    rows.push_back({{"bandwidth_mhz", p.bandwidth_mhz},
                    {"total_prbs", p.total_prbs},
                    {"rbg_size", p.rbg_size},
                    {"narrowband_starts", p.narrowband_starts}});
  return {{"version", "catm-nb-layout-1"}, {"bandwidths", rows}};
}

const BandwidthProfile& NarrowbandLayoutTable::profile(double bandwidth_mhz) const {
  for (const auto& p : profiles_)
    if (std::abs(p.bandwidth_mhz - bandwidth_mhz) < 1e-9) return p;
  std::ostringstream os;
  os << "no narrowband layout for " << bandwidth_mhz << " MHz";
  throw ConfigError(os.str());
}

// ---------------------------------------------------------------------------

std::vector<NarrowbandPlan> enumerate_narrowbands(const BandwidthProfile& profile) {
  profile.validate();
  std::vector<NarrowbandPlan> plans;
  for (std::size_t i = 0; i < profile.narrowband_starts.size(); ++i) {
    NarrowbandPlan plan;
    plan.nb_index = static_cast<int>(i);
    plan.prb_range = {profile.narrowband_starts[i], kNarrowbandPrbs};
    for (std::size_t g = 0; g < profile.rbg_layout.size(); ++g) {
      if (profile.rbg_layout[g].intersects(plan.prb_range)) {
        plan.blocked_rbgs.push_back(static_cast<int>(g));
        plan.wasted_prbs += profile.rbg_layout[g].count;
      }
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

NarrowbandPlan choose_narrowband(const BandwidthProfile& profile) {
  std::vector<NarrowbandPlan> plans = enumerate_narrowbands(profile);
  if (plans.empty()) throw ConfigError("bandwidth profile has no narrowbands");
  auto best = plans.begin();
  for (auto it = plans.begin(); it != plans.end(); ++it)
    if (it->wasted_prbs <= best->wasted_prbs) best = it;
  return *best;
}

// ---------------------------------------------------------------------------

ResourceGrid::ResourceGrid(int total_prbs, PrbRange narrowband, int mpdcch_capacity, int horizon_ttis)
    : total_prbs_(total_prbs),
      narrowband_(narrowband),
      mpdcch_capacity_(mpdcch_capacity),
      horizon_(horizon_ttis),
      slots_(static_cast<std::size_t>(horizon_ttis)) {
  if (total_prbs <= 0 || total_prbs > kMaxPrbs) throw ConfigError("resource grid: bad PRB count");
  if (narrowband.first < 0 || narrowband.count <= 0 || narrowband.end() > total_prbs)
    throw ConfigError("resource grid: narrowband outside carrier");
  if (mpdcch_capacity <= 0) throw ConfigError("resource grid: MPDCCH capacity must be positive");
  if (horizon_ttis <= 0) throw ConfigError("resource grid: horizon must be positive");
}

std::optional<Rejection> ResourceGrid::check(const ResourceRequest& r) const {
  if (r.num_ttis <= 0) throw InputError("reserve: empty TTI range");
  if (r.kind == ResourceKind::MpdcchUnits) {
    if (r.units <= 0) throw InputError("reserve: MPDCCH request must ask for at least one unit");
  } else {
    if (r.prbs.count <= 0) throw InputError("reserve: PRB request must ask for at least one PRB");
    if (r.prbs.first < 0 || r.prbs.end() > total_prbs_) throw InputError("reserve: PRBs outside carrier");
    if (r.prbs.first < narrowband_.first || r.prbs.end() > narrowband_.end())
      throw InputError("reserve: PRBs outside the Cat-M narrowband");
  }
  for (Tti t = r.first_tti; t < r.first_tti + r.num_ttis; ++t) {
    if (!in_window(t)) return Rejection{Binding::Horizon, t, "TTI outside booking window"};
    const Slot& s = slot(t);
    if (r.kind == ResourceKind::MpdcchUnits) {
      if (s.mpdcch_used + r.units > mpdcch_capacity_)
        return Rejection{Binding::MpdcchPool, t,
                         "MPDCCH pool has " + std::to_string(mpdcch_capacity_ - s.mpdcch_used) + " units, needs " +
                             std::to_string(r.units)};
    } else {
      const auto& bits = r.kind == ResourceKind::DownlinkPrbs ? s.dl : s.ul;
      for (int p = r.prbs.first; p < r.prbs.end(); ++p)
        if (bits.test(static_cast<std::size_t>(p)))
          return Rejection{Binding::Prbs, t, "PRB " + std::to_string(p) + " already booked"};
    }
  }
  return std::nullopt;
}

void ResourceGrid::apply(const ResourceRequest& r, bool book) {
  for (Tti t = std::max(r.first_tti, now_); t < r.first_tti + r.num_ttis; ++t) {
    Slot& s = slot(t);
    if (r.kind == ResourceKind::MpdcchUnits) {
      s.mpdcch_used += book ? r.units : -r.units;
    } else {
      auto& bits = r.kind == ResourceKind::DownlinkPrbs ? s.dl : s.ul;
      for (int p = r.prbs.first; p < r.prbs.end(); ++p) bits.set(static_cast<std::size_t>(p), book);
    }
  }
}

ReserveResult ResourceGrid::reserve(std::span<const ResourceRequest> requests, Owner owner) {
  if (requests.empty()) throw InputError("reserve: no requests");
  ReserveResult result;
  std::size_t applied = 0;
  for (; applied < requests.size(); ++applied) {
    if (auto rej = check(requests[applied])) {
      result.rejection = *rej;
      break;
    }
    apply(requests[applied], true);
  }
  if (applied < requests.size()) {
    for (std::size_t i = 0; i < applied; ++i) apply(requests[i], false);
    return result;
  }
  const ReservationId id = next_id_++;
  reservations_.emplace(id, Booking{owner, {requests.begin(), requests.end()}});
  result.id = id;
  return result;
}

void ResourceGrid::release(ReservationId id) {
  auto it = reservations_.find(id);
  if (it == reservations_.end()) return;
  for (const auto& r : it->second.requests) apply(r, false);
  reservations_.erase(it);
}

std::optional<PrbRange> ResourceGrid::find_free_prbs(ResourceKind kind, Tti first_tti, int num_ttis, int count) const {
  if (count <= 0 || count > narrowband_.count) return std::nullopt;
  for (Tti t = first_tti; t < first_tti + num_ttis; ++t)
    if (!in_window(t)) return std::nullopt;
  for (int start = narrowband_.first; start + count <= narrowband_.end(); ++start) {
    bool free = true;
    for (Tti t = first_tti; t < first_tti + num_ttis && free; ++t) {
      const auto& bits = kind == ResourceKind::DownlinkPrbs ? slot(t).dl : slot(t).ul;
      for (int p = start; p < start + count; ++p)
        if (bits.test(static_cast<std::size_t>(p))) {
          free = false;
          break;
        }
    }
    if (free) return PrbRange{start, count};
  }
  return std::nullopt;
}

int ResourceGrid::mpdcch_free(Tti tti) const {
  if (!in_window(tti)) return 0;
  return mpdcch_capacity_ - slot(tti).mpdcch_used;
}

int ResourceGrid::prbs_used(ResourceKind kind, Tti tti) const {
  if (!in_window(tti)) return 0;
  if (kind == ResourceKind::MpdcchUnits) return slot(tti).mpdcch_used;
  return static_cast<int>((kind == ResourceKind::DownlinkPrbs ? slot(tti).dl : slot(tti).ul).count());
}

bool ResourceGrid::prb_used(ResourceKind kind, Tti tti, int prb) const {
  if (!in_window(tti) || prb < 0 || prb >= total_prbs_) return false;
  return (kind == ResourceKind::DownlinkPrbs ? slot(tti).dl : slot(tti).ul).test(static_cast<std::size_t>(prb));
}

void ResourceGrid::advance_to(Tti tti) {
  if (tti <= now_) return;
  for (Tti t = now_; t < tti; ++t) {
    Slot& s = slot(t);
    usage_.ttis += 1;
    usage_.dl_prb_ttis += static_cast<std::int64_t>(s.dl.count());
    usage_.ul_prb_ttis += static_cast<std::int64_t>(s.ul.count());
    usage_.mpdcch_unit_ttis += s.mpdcch_used;
    usage_.max_mpdcch_units_in_tti = std::max<std::int64_t>(usage_.max_mpdcch_units_in_tti, s.mpdcch_used);
    s = Slot{};
  }
  now_ = tti;
  for (auto it = reservations_.begin(); it != reservations_.end();) {
    Tti last = 0;
    for (const auto& r : it->second.requests) last = std::max(last, r.first_tti + r.num_ttis - 1);
    it = last < now_ ? reservations_.erase(it) : std::next(it);
  }
}

void ResourceGrid::audit() const {
  std::vector<Slot> expect(slots_.size());
  for (const auto& [id, booking] : reservations_) {
    for (const auto& r : booking.requests) {
      for (Tti t = std::max(r.first_tti, now_); t < r.first_tti + r.num_ttis; ++t) {
        CATM_ENSURE(in_window(t), "reservation beyond window");
        Slot& s = expect[static_cast<std::size_t>(t % horizon_)];
        if (r.kind == ResourceKind::MpdcchUnits) {
          s.mpdcch_used += r.units;
        } else {
          auto& bits = r.kind == ResourceKind::DownlinkPrbs ? s.dl : s.ul;
          for (int p = r.prbs.first; p < r.prbs.end(); ++p) {
            CATM_ENSURE(!bits.test(static_cast<std::size_t>(p)), "PRB double-booked at tti " + std::to_string(t));
            bits.set(static_cast<std::size_t>(p));
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    CATM_ENSURE(slots_[i].mpdcch_used <= mpdcch_capacity_, "MPDCCH pool over capacity");
    CATM_ENSURE(slots_[i].mpdcch_used == expect[i].mpdcch_used, "MPDCCH bookkeeping mismatch");
    CATM_ENSURE(slots_[i].dl == expect[i].dl && slots_[i].ul == expect[i].ul, "PRB bookkeeping mismatch");
  }
}

}  // namespace catm::grid
