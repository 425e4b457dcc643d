#include "catm/link_adaptation.hpp"

#include <algorithm>
#include <cmath>

namespace catm::mac {

LinkAdaptationState LinkAdaptationState::with_target(double ibler_target, double step_up_db, int initial_mcs) {
  LinkAdaptationState la;
  la.ibler_target = ibler_target;
  la.step_up_db = step_up_db;
  la.step_down_db = step_up_db * (1.0 - ibler_target) / ibler_target;
  la.initial_mcs = initial_mcs;
  la.validate();
  return la;
}

void LinkAdaptationState::validate() const {
  if (!(ibler_target > 0.0 && ibler_target < 1.0)) throw ConfigError("ibler_target must lie in (0,1)");
  if (!(step_up_db > 0.0) || !(step_down_db > 0.0)) throw ConfigError("OLLA steps must be positive");
  const double expect = step_up_db * (1.0 - ibler_target) / ibler_target;
  if (std::abs(step_down_db - expect) > 1e-9 * std::max(1.0, expect))
    throw ConfigError("OLLA step_down must equal step_up * (1 - target) / target");
}

double outer_loop_update(LinkAdaptationState& la, bool ack) {
  la.olla_offset_db += ack ? la.step_up_db : -la.step_down_db;
  la.olla_offset_db = std::clamp(la.olla_offset_db, -kOllaClampDb, kOllaClampDb);
  return la.olla_offset_db;
}

}  // namespace catm::mac
