#include "catm/scenario.hpp"

#include <array>
#include <fstream>
#include <set>
#include <type_traits>
#include <utility>

namespace catm::sim {

// ---------------------------------------------------------------------------
// Enum names

template <class E>
struct EnumNames;

#define CATM_ENUM_NAMES(E, ...)                                         \
  template <>                                                           \
  struct EnumNames<E> {                                                 \
    static constexpr std::pair<E, const char*> values[] = {__VA_ARGS__}; \
  };

CATM_ENUM_NAMES(Direction, {Direction::Uplink, "UL"}, {Direction::Downlink, "DL"})
CATM_ENUM_NAMES(TrafficKind, {TrafficKind::Bursty, "bursty"}, {TrafficKind::Voip, "voip"},
                {TrafficKind::FullBuffer, "full_buffer"})
CATM_ENUM_NAMES(InterferenceMode, {InterferenceMode::Reserved, "reserved"}, {InterferenceMode::Shared, "shared"})
CATM_ENUM_NAMES(TraceLevel, {TraceLevel::None, "none"}, {TraceLevel::Summary, "summary"}, {TraceLevel::Full, "full"})
CATM_ENUM_NAMES(ue::PowerControlMode, {ue::PowerControlMode::Olpc, "OLPC"}, {ue::PowerControlMode::Clpc, "CLPC"})
CATM_ENUM_NAMES(ue::CqiMode, {ue::CqiMode::Periodic, "periodic"}, {ue::CqiMode::AperiodicOnPusch, "aperiodic"})

template <class E>
const char* enum_name(E e) {
  for (const auto& [v, n] : EnumNames<E>::values)
    if (v == e) return n;
  return "?";
}

const char* to_string(TrafficKind k) { return enum_name(k); }
const char* to_string(InterferenceMode m) { return enum_name(m); }
const char* to_string(TraceLevel t) { return enum_name(t); }

// ---------------------------------------------------------------------------
// Field lists, shared by the reader and the writer

template <class A> void fields(A& a, radio::AntennaPattern& c) {
  a("max_gain_db", c.max_gain_db);
  a("vertical_beamwidth_deg", c.vertical_beamwidth_deg);
  a("sla_db", c.sla_db);
  a("downtilt_deg", c.downtilt_deg);
  a("horizontal_beamwidth_deg", c.horizontal_beamwidth_deg);
  a("horizontal_am_db", c.horizontal_am_db);
  a("omni_horizontal", c.omni_horizontal);
}
template <class A> void fields(A& a, LayoutConfig& c) {
  a("rings", c.rings);
  a("isd_m", c.isd_m);
  a("sectors", c.sectors);
  a("wraparound", c.wraparound);
  a("enb_height_m", c.enb_height_m);
  a("ue_height_m", c.ue_height_m);
  a("min_distance_m", c.min_distance_m);
  a("measure_center_only", c.measure_center_only);
}
template <class A> void fields(A& a, RadioConfig& c) {
  a("carrier_ghz", c.carrier_ghz);
  a("shadow_std_db", c.shadow_std_db);
  a("body_loss_db", c.body_loss_db);
  a("ue_antenna_gain_db", c.ue_antenna_gain_db);
  a("enb_total_power_dbm", c.enb_total_power_dbm);
  a("antenna", c.antenna);
  a("bler_table", c.bler_table);
  a("tbs_table", c.tbs_table);
  a("interference", c.interference);
  a("legacy_load", c.legacy_load);
  a("legacy_ul_interference_dbm_per_prb", c.legacy_ul_interference_dbm_per_prb);
}
template <class A> void fields(A& a, BandwidthConfig& c) {
  a("bandwidth_mhz", c.bandwidth_mhz);
  a("narrowband", c.narrowband);
  a("layout_table", c.layout_table);
}
template <class A> void fields(A& a, traffic::BurstyParams& c) {
  a("mean_interarrival_ms", c.mean_interarrival_ms);
  a("min_interarrival_ms", c.min_interarrival_ms);
  a("size_bits", c.size_bits);
  a("direction", c.direction);
  a("dl_ack_bits", c.dl_ack_bits);
  a("header_bits", c.header_bits);
}
template <class A> void fields(A& a, traffic::VoipParams& c) {
  a("mean_talk_ms", c.mean_talk_ms);
  a("mean_silence_ms", c.mean_silence_ms);
  a("voice_period_ms", c.voice_period_ms);
  a("sid_period_ms", c.sid_period_ms);
  a("voice_bits", c.voice_bits);
  a("sid_bits", c.sid_bits);
  a("partner_phase_ms", c.partner_phase_ms);
}
template <class A> void fields(A& a, traffic::FullBufferParams& c) {
  a("direction", c.direction);
  a("block_bits", c.block_bits);
}
template <class A> void fields(A& a, TrafficConfig& c) {
  a("kind", c.kind);
  a("bursty", c.bursty);
  a("voip", c.voip);
  a("full_buffer", c.full_buffer);
}
template <class A> void fields(A& a, ue::CeConfig& c) {
  a("rl_mpdcch", c.rl_mpdcch);
  a("rl_pusch", c.rl_pusch);
  a("rl_pdsch", c.rl_pdsch);
  a("rl_pucch", c.rl_pucch);
}
template <class A> void fields(A& a, ue::DrxConfig& c) {
  a("cycle_ms", c.cycle_ms);
  a("on_duration_ms", c.on_duration_ms);
  a("inactivity_ms", c.inactivity_ms);
}
template <class A> void fields(A& a, ue::CqiConfig& c) {
  a("mode", c.mode);
  a("period_ms", c.period_ms);
}
template <class A> void fields(A& a, ue::PowerControlState& c) {
  a("p_max_dbm", c.p_max_dbm);
  a("p0_dbm", c.p0_dbm);
  a("alpha", c.alpha);
  a("mode", c.mode);
}
template <class A> void fields(A& a, UeGroup& c) {
  a("name", c.name);
  a("count", c.count);
  a("traffic", c.traffic);
  a("ce", c.ce);
  a("adaptive_rl", c.adaptive_rl);
  a("dormancy_ms", c.dormancy_ms);
  a("drx", c.drx);
  a("cqi", c.cqi);
  a("power_control", c.power_control);
  a("coupling_loss_db", c.coupling_loss_db);
  a("start_connected", c.start_connected);
}
template <class A> void fields(A& a, mac::AglTiers& c) {
  a("upper_bounds_db", c.upper_bounds_db);
  a("levels", c.levels);
}
template <class A> void fields(A& a, ClpcConfig& c) {
  a("target_sinr_db", c.target_sinr_db);
  a("min_samples", c.min_samples);
  a("step_db", c.step_db);
  a("accum_limit_db", c.accum_limit_db);
}
template <class A> void fields(A& a, SchedulerConfig& c) {
  a("ibler_target", c.ibler_target);
  a("step_up_db", c.step_up_db);
  a("initial_mcs", c.initial_mcs);
  a("agl_tiers", c.agl_tiers);
  a("max_attempts", c.max_attempts);
  a("harq_processes", c.harq_processes);
  a("rl_cap", c.rl_cap);
  a("max_tbs_bits", c.max_tbs_bits);
  a("voip_aggregation", c.voip_aggregation);
  a("voip_delay_budget_ms", c.voip_delay_budget_ms);
  a("sr_period_ms", c.sr_period_ms);
  a("clpc", c.clpc);
}
template <class A> void fields(A& a, ue::RachConfig& c) {
  a("preamble_repetitions", c.preamble_repetitions);
  a("rar_window_ms", c.rar_window_ms);
  a("contention_ms", c.contention_ms);
  a("backoff_ms", c.backoff_ms);
  a("cl50_db", c.cl50_db);
  a("slope_db", c.slope_db);
  a("prach_prbs", c.prach_prbs);
}
template <class A> void fields(A& a, OutputConfig& c) { a("trace", c.trace); }
template <class A> void fields(A& a, Scenario& c) {
  a("name", c.name);
  a("seed", c.seed);
  a("duration_ms", c.duration_ms);
  a("layout", c.layout);
  a("radio", c.radio);
  a("bandwidth", c.bandwidth);
  a("ue_groups", c.ue_groups);
  a("scheduler", c.scheduler);
  a("rach", c.rach);
  a("output", c.output);
}

template <class T, class = void>
struct HasFields : std::false_type {};
struct ProbeArchive {
  template <class U> void operator()(const char*, U&) {}
};
template <class T>
struct HasFields<T, std::void_t<decltype(fields(std::declval<ProbeArchive&>(), std::declval<T&>()))>>
    : std::true_type {};

template <class T> struct IsOptional : std::false_type {};
template <class T> struct IsOptional<std::optional<T>> : std::true_type {};
template <class T> struct IsVector : std::false_type {};
template <class T> struct IsVector<std::vector<T>> : std::true_type {};

// ---------------------------------------------------------------------------
// Reader

class Reader {
 public:
  Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <class T>
  void operator()(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    read(*it, out, path_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw ConfigError(path_ + "." + key + ": unknown key");
  }

  template <class T>
  static void read(const nlohmann::json& v, T& out, const std::string& path) {
    if constexpr (HasFields<T>::value) {
      Reader r(v, path);
      fields(r, out);
      r.finish();
    } else if constexpr (IsOptional<T>::value) {
      if (v.is_null()) {
        out.reset();
      } else {
        typename T::value_type inner{};
        read(v, inner, path);
        out = std::move(inner);
      }
    } else if constexpr (IsVector<T>::value) {
      if (!v.is_array()) throw ConfigError(path + ": expected an array");
      out.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        typename T::value_type item{};
        read(v[i], item, path + "[" + std::to_string(i) + "]");
        out.push_back(std::move(item));
      }
    } else if constexpr (std::is_enum_v<T>) {
      if (!v.is_string()) throw ConfigError(path + ": expected a string");
      const auto s = v.get<std::string>();
      for (const auto& [e, n] : EnumNames<T>::values)
        if (s == n) {
          out = e;
          return;
        }
      std::string allowed;
      for (const auto& [e, n] : EnumNames<T>::values) allowed += std::string(allowed.empty() ? "" : ", ") + n;
      throw ConfigError(path + ": '" + s + "' is not one of {" + allowed + "}");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path + ": expected true/false");
      out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.get<std::int64_t>() < 0 && !v.is_number_unsigned()) throw ConfigError(path + ": must be >= 0");
      }
      out = v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path + ": expected a number");
      out = v.get<T>();
    } else {
      if (!v.is_string()) throw ConfigError(path + ": expected a string");
      out = v.get<T>();
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// ---------------------------------------------------------------------------
// Writer

class Writer {
 public:
  template <class T>
  void operator()(const char* key, T& value) {
    j_[key] = write(value);
  }
  nlohmann::json take() { return std::move(j_); }

  template <class T>
  static nlohmann::json write(T& v) {
    if constexpr (HasFields<T>::value) {
      Writer w;
      w.j_ = nlohmann::json::object();
      fields(w, v);
      return w.take();
    } else if constexpr (IsOptional<T>::value) {
      return v ? write(*v) : nlohmann::json(nullptr);
    } else if constexpr (IsVector<T>::value) {
      nlohmann::json arr = nlohmann::json::array();
      for (auto& item : v) arr.push_back(write(item));
      return arr;
    } else if constexpr (std::is_enum_v<T>) {
      return enum_name(v);
    } else {
      return v;
    }
  }

 private:
  nlohmann::json j_ = nlohmann::json::object();
};

// ---------------------------------------------------------------------------

Scenario scenario_from_json(const nlohmann::json& doc) {
  Scenario s;
  s.ue_groups.clear();
  Reader::read(doc, s, "scenario");
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario file '" + path + "': " + e.what());
  }
  return scenario_from_json(doc);
}

nlohmann::json to_json(const Scenario& s) {
  Scenario copy = s;
  return Writer::write(copy);
}

int Scenario::total_ues() const {
  int n = 0;
  for (const auto& g : ue_groups) n += g.count;
  return n;
}

namespace {
template <class F>
void at_path(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}
}  // namespace

void Scenario::validate() const {
  auto fail = [](const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); };
  if (duration_ms < 0) fail("scenario.duration_ms", "must be >= 0");
  if (layout.rings < 0) fail("scenario.layout.rings", "must be >= 0");
  if (!(layout.isd_m > 0)) fail("scenario.layout.isd_m", "must be positive");
  if (layout.sectors != 1 && layout.sectors != 3) fail("scenario.layout.sectors", "must be 1 or 3");
  if (!(layout.enb_height_m > layout.ue_height_m)) fail("scenario.layout.enb_height_m", "must exceed the UE height");
  if (!(layout.min_distance_m > 0)) fail("scenario.layout.min_distance_m", "must be positive");
  at_path("scenario.radio.antenna", [&] { radio.antenna.validate(); });
  if (!(radio.shadow_std_db >= 0)) fail("scenario.radio.shadow_std_db", "must be >= 0");
  if (!(radio.carrier_ghz > 0)) fail("scenario.radio.carrier_ghz", "must be positive");
  if (!(radio.legacy_load >= 0 && radio.legacy_load <= 1)) fail("scenario.radio.legacy_load", "must lie in [0,1]");
  if (ue_groups.empty() || total_ues() == 0) fail("scenario.ue_groups", "at least one UE is required");
  for (std::size_t i = 0; i < ue_groups.size(); ++i) {
    const UeGroup& g = ue_groups[i];
    const std::string p = "scenario.ue_groups[" + std::to_string(i) + "]";
    if (g.count < 0) fail(p + ".count", "must be >= 0");
    if (g.dormancy_ms <= 0) fail(p + ".dormancy_ms", "must be positive");
    at_path(p + ".traffic.bursty", [&] { g.traffic.bursty.validate(); });
    at_path(p + ".traffic.voip", [&] { g.traffic.voip.validate(); });
    if (g.traffic.full_buffer.block_bits <= 0) fail(p + ".traffic.full_buffer.block_bits", "must be positive");
    if (g.ce) at_path(p + ".ce", [&] { g.ce->validate(); });
    if (g.drx) at_path(p + ".drx", [&] { g.drx->validate(); });
    at_path(p + ".cqi", [&] { g.cqi.validate(); });
    at_path(p + ".power_control", [&] { g.power_control.validate(); });
    if (g.coupling_loss_db && !std::isfinite(*g.coupling_loss_db)) fail(p + ".coupling_loss_db", "must be finite");
  }
  at_path("scenario.scheduler", [&] {
    mac::LinkAdaptationState::with_target(scheduler.ibler_target, scheduler.step_up_db, scheduler.initial_mcs);
  });
  if (scheduler.initial_mcs < 0 || scheduler.initial_mcs >= TbsTable::kNumMcs)
    fail("scenario.scheduler.initial_mcs", "must lie in [0,15]");
  at_path("scenario.scheduler.agl_tiers", [&] { scheduler.agl_tiers.validate(); });
  if (scheduler.max_attempts < 1) fail("scenario.scheduler.max_attempts", "must be >= 1");
  if (scheduler.harq_processes < 1 || scheduler.harq_processes > 16)
    fail("scenario.scheduler.harq_processes", "must lie in [1,16]");
  at_path("scenario.scheduler.rl_cap", [&] { require_repetition(scheduler.rl_cap, "rl_cap"); });
  if (scheduler.max_tbs_bits <= 0) fail("scenario.scheduler.max_tbs_bits", "must be positive");
  if (!(scheduler.voip_delay_budget_ms > 0)) fail("scenario.scheduler.voip_delay_budget_ms", "must be positive");
  if (scheduler.sr_period_ms <= 0) fail("scenario.scheduler.sr_period_ms", "must be positive");
  if (scheduler.clpc.min_samples < 1) fail("scenario.scheduler.clpc.min_samples", "must be >= 1");
  at_path("scenario.rach", [&] { rach.validate(); });
}

}  // namespace catm::sim
