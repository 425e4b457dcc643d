#pragma once

#include "catm/common.hpp"

namespace catm::mac {

inline constexpr double kOllaClampDb = 10.0;

/// Outer-loop link adaptation on first-transmission ACK/NACK.
struct LinkAdaptationState {
  double ibler_target = 0.10;
  double olla_offset_db = 0.0;
  double step_up_db = 0.01;
  double step_down_db = 0.09;
  int initial_mcs = 6;

  /// step_down = step_up * (1 - target) / target keeps the long-run NACK rate at target.
  static LinkAdaptationState with_target(double ibler_target, double step_up_db, int initial_mcs = 6);

  void validate() const;
  bool operator==(const LinkAdaptationState&) const = default;
};

/// ACK raises the offset by step_up, NACK lowers it by step_down; clamped to +-10 dB.
double outer_loop_update(LinkAdaptationState& la, bool ack);

}  // namespace catm::mac
